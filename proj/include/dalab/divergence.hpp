#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dalab/finite.hpp"
#include "dalab/tensor.hpp"

namespace dalab {

enum class DivergenceFlavor { hdh, f_latent, f_gdg, fg_dfg };

DivergenceFlavor divergence_flavor_from_string(const std::string& s);
std::string to_string(DivergenceFlavor f);

struct DivergenceEstimate {
  double value = 0.0;
  std::string flavor;
  std::size_t class_size_f = 0;
  std::size_t class_size_g = 0;
  std::size_t n_src = 0;
  std::size_t n_tgt = 0;
  std::size_t pairs_evaluated = 0;
  double elapsed_ms = 0.0;
};

// Refuse rather than subsample beyond this many evaluated tuples, so
// "exact" stays honest.
inline constexpr std::size_t kDefaultEnumerationBudget = 10'000'000;

// Suprema over explicit function sets. All values are exact maxima of
// |R_S(.,.) - R_T(.,.)| over the stated index ranges, in enumeration order.

// sup over (h, h') in H x H
double hdh_divergence(const FunctionSet& hypotheses, const std::vector<int>& S,
                      const std::vector<int>& T,
                      std::size_t budget = kDefaultEnumerationBudget);

// sup over (f, f') in F x F on embedded samples g(S), g(T)
double latent_divergence(const FunctionSet& predictors,
                         const FiniteFunction& encoder,
                         const std::vector<int>& S, const std::vector<int>& T,
                         std::size_t budget = kDefaultEnumerationBudget);

// sup over f in F and (g, g') in G x G of |R_S(fg, fg') - R_T(fg, fg')|
double f_gdg_divergence(const FunctionSet& predictors,
                        const FunctionSet& encoders, const std::vector<int>& S,
                        const std::vector<int>& T,
                        std::size_t budget = kDefaultEnumerationBudget);

// Flavor dispatch over a layered instance at a split. f_latent requires the
// index of the fixed encoder within G_split.
DivergenceEstimate exact_divergence(DivergenceFlavor flavor,
                                    const FiniteInstance& instance,
                                    std::size_t split,
                                    std::size_t fixed_encoder_index = 0,
                                    std::size_t budget = kDefaultEnumerationBudget);

struct ProxyConfig {
  std::vector<std::size_t> hidden = {64, 64};
  std::size_t epochs = 60;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  double holdout_fraction = 0.5;
};

struct ProxyEstimate {
  double heldout_err = 0.5;
  double proxy_a = 0.0;           // max(0, 2 * (1 - 2 * err))
  double disc_loss = 0.0;         // final training cross-entropy
  std::size_t n_src = 0, n_tgt = 0;
};

inline double proxy_a_from_error(double err) {
  double v = 2.0 * (1.0 - 2.0 * err);
  return v < 0.0 ? 0.0 : v;
}

// Trains a fresh domain discriminator on a split of the activations and
// reports held-out error plus the proxy A-distance.
ProxyEstimate proxy_divergence(const Tensor& src_activations,
                               const Tensor& tgt_activations,
                               const ProxyConfig& config, std::uint64_t seed);

}  // namespace dalab
