#pragma once

#include <string>
#include <vector>

#include "dalab/divergence.hpp"
#include "dalab/finite.hpp"

namespace dalab {

enum class LambdaKind { lambda_h, lambda_f_of_g, lambda_fg_of_g, lambda_fg_joint };

// Best in-class joint risks, exact infima by exhaustive enumeration.
//   lambda_h:        inf_h   R_S(h) + R_T(h) over the composed class
//   lambda_f_of_g:   inf_f'  R_S(f'g) + R_T(f'g), g fixed
//   lambda_fg_of_g:  inf_{f',g'} 2 R_S(f'g) + R_S(f'g') + R_T(f'g'), g fixed
//   lambda_fg_joint: inf_{f,g} R_S(fg) + R_T(fg)
double lambda_h(const FunctionSet& hypotheses, const FiniteInstance& inst);
double lambda_f_of_g(const FunctionSet& predictors, const FiniteFunction& encoder,
                     const FiniteInstance& inst);
double lambda_fg_of_g(const FunctionSet& predictors, const FunctionSet& encoders,
                      const FiniteFunction& encoder, const FiniteInstance& inst);
double lambda_fg_joint(const FunctionSet& predictors, const FunctionSet& encoders,
                       const FiniteInstance& inst);

// dispatcher matching the flavor names used by the CLI
double lambda_term(LambdaKind kind, const FiniteInstance& inst, std::size_t split,
                   std::size_t fixed_encoder_index = 0,
                   std::size_t budget = kDefaultEnumerationBudget);

inline constexpr double kViolationSlack = 1e-12;

struct BoundReport {
  std::string instance_id;
  std::size_t split = 1;
  std::size_t f_index = 0, g_index = 0;
  double r_s = 0.0, r_t = 0.0;

  double d_hdh = 0.0, lam_h = 0.0, composed_rhs = 0.0;
  double d_latent = 0.0, lam_f_of_g = 0.0, prior_rhs = 0.0;  // fixed-encoder bound
  double d_fgdg = 0.0, lam_fg_of_g = 0.0, main_rhs = 0.0;    // split bound

  bool composed_violated = false;
  bool prior_violated = false;
  bool main_violated = false;
  std::string tighter;  // "composed" or "main" (no universal ordering holds)

  std::string to_json() const;
};

BoundReport bound_report(const FiniteInstance& instance, std::size_t split,
                         std::size_t f_index, std::size_t g_index,
                         std::size_t budget = kDefaultEnumerationBudget);

struct LayerBoundSweep {
  double r_s = 0.0, r_t = 0.0;
  std::vector<double> per_split_rhs;  // index i-1 holds the split-i bound
  double min_rhs = 0.0;
  std::size_t argmin_split = 1;
};

// Evaluates the layer-specific bound at every split for the hypothesis
// picked by layer_choice (one function index per layer).
LayerBoundSweep layer_bound_sweep(const FiniteInstance& instance,
                                  const std::vector<std::size_t>& layer_choice,
                                  std::size_t budget = kDefaultEnumerationBudget);

// Per-split classes, materialized. splits[i-1] holds (F_i, G_i).
struct SplitClassSet {
  std::vector<FunctionSet> predictors;
  std::vector<FunctionSet> encoders;
};

SplitClassSet split_classes(const FiniteInstance& instance);

// Fault-injection variant: encoder classes at deeper splits are replaced by
// random tables, breaking G_j = Q o G_i nesting.
SplitClassSet corrupted_split_classes(const FiniteInstance& instance, Rng& rng);

struct MonotonicityWitness {
  std::size_t i = 0, j = 0;
  std::string direction;  // "embedding_complexity" or "latent"
  double value_i = 0.0, value_j = 0.0;
};

struct MonotonicityResult {
  std::size_t violations = 0;
  std::vector<MonotonicityWitness> witnesses;
  std::vector<double> fgdg_per_split;        // should be nondecreasing in i
  std::vector<double> latent_sup_per_split;  // should be nonincreasing in i
};

MonotonicityResult monotonicity_check(const FiniteInstance& instance,
                                      std::size_t budget = kDefaultEnumerationBudget);
MonotonicityResult monotonicity_check_explicit(
    const SplitClassSet& classes, const FiniteInstance& instance,
    std::size_t budget = kDefaultEnumerationBudget);

}  // namespace dalab
