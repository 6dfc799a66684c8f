#include "dalab/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace dalab {

void Adam::step(ParamMap& params, const ParamMap& grads) {
  for (auto& [name, p] : params) {
    auto it = grads.find(name);
    if (it == grads.end())
      throw std::runtime_error("adam: missing gradient for parameter '" + name + "'");
    if (!it->second.same_shape(p))
      throw ShapeError("adam: gradient shape mismatch for parameter '" + name + "'");
    if (!it->second.all_finite())
      throw NumericError("adam: non-finite gradient for parameter '" + name + "'");
  }

  ++t_;
  double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));

  for (auto& [name, p] : params) {
    const Tensor& g = grads.at(name);
    Tensor& m = m_.try_emplace(name, Tensor::zeros_like(p)).first->second;
    Tensor& v = v_.try_emplace(name, Tensor::zeros_like(p)).first->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      p[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
    }
  }
}

}  // namespace dalab
