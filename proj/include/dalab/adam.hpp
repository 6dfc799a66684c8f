#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dalab/tensor.hpp"

namespace dalab {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

using ParamMap = std::map<std::string, Tensor>;

// Adam with bias correction. Moment state is keyed like the parameters;
// the step counter advances by one per update.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  void step(ParamMap& params, const ParamMap& grads);

  std::uint64_t steps_taken() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
  std::map<std::string, Tensor> m_, v_;
};

}  // namespace dalab
