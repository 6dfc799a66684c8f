#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dalab/adam.hpp"
#include "dalab/dataset.hpp"
#include "dalab/rng.hpp"
#include "dalab/tape.hpp"
#include "dalab/tensor.hpp"

namespace dalab {

struct LayerSpec {
  std::size_t in = 0;
  std::size_t out = 0;
  bool relu = true;
};

// Feedforward network: a stack of affine(+ReLU) layers ending in a softmax
// head over the last layer's width. Layer k's post-nonlinearity output is
// "activation k" (1-based); splitting at index i makes layers 1..i the
// encoder and i+1..N the predictor.
class LayeredNet {
 public:
  LayeredNet() = default;
  LayeredNet(std::vector<LayerSpec> specs, std::uint64_t init_seed,
             double init_scale = 1.0);

  // hidden layers ReLU, final layer linear into the softmax head
  static LayeredNet mlp(const std::vector<std::size_t>& widths,
                        std::uint64_t init_seed);

  std::size_t depth() const { return specs_.size(); }
  std::size_t input_dim() const { return specs_.front().in; }
  std::size_t num_classes() const { return specs_.back().out; }
  const std::vector<LayerSpec>& specs() const { return specs_; }

  ParamMap& params() { return params_; }
  const ParamMap& params() const { return params_; }

  // all N per-layer activations for a batch (x: (n, d))
  std::vector<Tensor> forward_activations(const Tensor& x) const;

  // softmax probabilities (n, K); rows sum to 1
  Tensor predict_proba(const Tensor& x) const;

  // argmax labels, ties broken toward the lowest class index
  std::vector<int> predict(const Tensor& x) const;

  // plain (non-tape) forward through layers (from, to]; from = 0 starts at
  // the input, to = depth() runs the whole net
  Tensor forward_range(const Tensor& x, std::size_t from, std::size_t to) const;

  // tape forward through layers (from, to]; pids maps parameter names to
  // tape leaf ids (see leaf_params)
  int tape_forward(Tape& t, int x, const std::map<std::string, int>& pids,
                   std::size_t from, std::size_t to) const;

  std::map<std::string, int> leaf_params(Tape& t) const;

  static std::string weight_name(std::size_t layer);
  static std::string bias_name(std::size_t layer);

  void save(const std::string& path) const;
  static LayeredNet load(const std::string& path);

 private:
  std::vector<LayerSpec> specs_;
  ParamMap params_;
};

// Encoder/predictor view of a net at a split index in [1, N-1].
struct SplitView {
  const LayeredNet* net = nullptr;
  std::size_t split_index = 1;

  SplitView(const LayeredNet& n, std::size_t i);
  Tensor encode(const Tensor& x) const;
  Tensor predict_proba_from_latent(const Tensor& z) const;
};

// Domain discriminator attached to one layer's activation space.
struct Discriminator {
  LayeredNet net;
  std::size_t attached_layer = 0;

  Discriminator(std::size_t input_width, std::size_t attached,
                std::uint64_t init_seed,
                const std::vector<std::size_t>& hidden = {256, 256});
};

double zero_one_risk(const LayeredNet& net, const DomainDataset& ds);
double disagreement(const LayeredNet& a, const LayeredNet& b,
                    const DomainDataset& ds);
double disagreement(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace dalab
