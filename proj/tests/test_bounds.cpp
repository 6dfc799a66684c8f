#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "dalab/bounds.hpp"
#include "dalab/rng.hpp"

using namespace dalab;

namespace {

// X = {0,1,2}, two layers: identity encoder choices and threshold predictors,
// labels y = 1[x >= 1] in both domains
FiniteInstance threshold_instance() {
  FiniteInstance inst;
  inst.id = "threshold";
  inst.space_sizes = {3, 3, 2};
  inst.layers.resize(2);
  inst.layers[0] = {FiniteFunction{0, 1, 2}};  // identity embedding
  for (int t = 0; t <= 3; ++t) {
    FiniteFunction f(3);
    for (int x = 0; x < 3; ++x) f[static_cast<std::size_t>(x)] = x >= t ? 1 : 0;
    inst.layers[1].push_back(f);
  }
  inst.src_points = {0, 1};
  inst.src_labels = {0, 1};
  inst.tgt_points = {1, 2};
  inst.tgt_labels = {1, 1};
  inst.validate();
  return inst;
}

}  // namespace

TEST_CASE("lambda_h on the threshold instance is 0") {
  FiniteInstance inst = threshold_instance();
  CHECK(lambda_h(inst.compose_encoders(2), inst) == 0.0);
}

TEST_CASE("singleton classes: lambda is the directly computed sum") {
  FiniteInstance inst = threshold_instance();
  FunctionSet F = {inst.layers[1][1]};  // 1[x >= 1]
  FunctionSet G = {inst.layers[0][0]};
  double direct = 2.0 * label_risk(F[0], inst.src_points, inst.src_labels) +
                  label_risk(F[0], inst.src_points, inst.src_labels) +
                  label_risk(F[0], inst.tgt_points, inst.tgt_labels);
  CHECK(lambda_fg_of_g(F, G, G[0], inst) == direct);
  CHECK(lambda_fg_joint(F, G, inst) ==
        label_risk(F[0], inst.src_points, inst.src_labels) +
            label_risk(F[0], inst.tgt_points, inst.tgt_labels));
}

TEST_CASE("bound_report: realizable pair satisfies everything") {
  FiniteInstance inst = threshold_instance();
  // f index 1 is the perfect threshold 1[x >= 1]
  BoundReport rep = bound_report(inst, 1, 1, 0);
  CHECK(rep.r_t == 0.0);
  CHECK_FALSE(rep.composed_violated);
  CHECK_FALSE(rep.prior_violated);
  CHECK_FALSE(rep.main_violated);
  CHECK(rep.lam_h == 0.0);
}

TEST_CASE("bound soundness over random instances, every (f, g) pair") {
  Rng rng(23);
  InstanceRanges ranges;
  for (int k = 0; k < 40; ++k) {
    FiniteInstance inst = random_instance(rng, ranges, "sound");
    for (std::size_t i = 1; i < inst.depth(); ++i) {
      std::size_t nf = inst.predictor_class_size(i);
      std::size_t ng = inst.encoder_class_size(i);
      for (std::size_t f = 0; f < nf; ++f)
        for (std::size_t g = 0; g < ng; ++g) {
          BoundReport rep = bound_report(inst, i, f, g);
          CHECK(rep.composed_rhs >= rep.r_t - kViolationSlack);
          CHECK(rep.prior_rhs >= rep.r_t - kViolationSlack);
          CHECK(rep.main_rhs >= rep.r_t - kViolationSlack);
          CHECK_FALSE(rep.composed_violated);
          CHECK_FALSE(rep.main_violated);
        }
    }
  }
}

TEST_CASE("lambda ordering: joint infimum never exceeds the fixed-g variant") {
  Rng rng(29);
  InstanceRanges ranges;
  for (int k = 0; k < 30; ++k) {
    FiniteInstance inst = random_instance(rng, ranges, "lam");
    for (std::size_t i = 1; i < inst.depth(); ++i) {
      auto F = inst.compose_predictors(i);
      auto G = inst.compose_encoders(i);
      double joint = lambda_fg_joint(F, G, inst);
      for (const auto& g : G) CHECK(joint <= lambda_f_of_g(F, g, inst));
    }
  }
}

TEST_CASE("layer_bound_sweep: min is the exact componentwise minimum") {
  Rng rng(37);
  InstanceRanges ranges;
  for (int k = 0; k < 20; ++k) {
    FiniteInstance inst = random_instance(rng, ranges, "sweep");
    std::vector<std::size_t> choice;
    for (const auto& layer : inst.layers)
      choice.push_back(rng.below(layer.size()));
    LayerBoundSweep s = layer_bound_sweep(inst, choice);
    REQUIRE(s.per_split_rhs.size() == inst.depth() - 1);
    double m = *std::min_element(s.per_split_rhs.begin(), s.per_split_rhs.end());
    CHECK(s.min_rhs == m);
    CHECK(s.per_split_rhs[s.argmin_split - 1] == m);
    CHECK(s.min_rhs >= s.r_t - kViolationSlack);
  }
}

TEST_CASE("depth 2: the sweep vector has one entry equal to the split bound") {
  FiniteInstance inst = threshold_instance();
  LayerBoundSweep s = layer_bound_sweep(inst, {0, 1});
  REQUIRE(s.per_split_rhs.size() == 1);
  BoundReport rep = bound_report(inst, 1, 1, 0);
  CHECK(s.per_split_rhs[0] == rep.main_rhs);
}

TEST_CASE("monotonicity holds on valid instances, equality at i == j") {
  Rng rng(41);
  InstanceRanges ranges;
  for (int k = 0; k < 40; ++k) {
    FiniteInstance inst = random_instance(rng, ranges, "prop");
    MonotonicityResult res = monotonicity_check(inst);
    CHECK(res.violations == 0);
    for (std::size_t i = 0; i + 1 < res.fgdg_per_split.size(); ++i)
      CHECK(res.fgdg_per_split[i] <= res.fgdg_per_split[i + 1] + kViolationSlack);
    for (std::size_t i = 0; i + 1 < res.latent_sup_per_split.size(); ++i)
      CHECK(res.latent_sup_per_split[i] >=
            res.latent_sup_per_split[i + 1] - kViolationSlack);
  }
}

TEST_CASE("corrupted nesting produces detectable violations with witnesses") {
  Rng rng(47);
  InstanceRanges ranges;
  ranges.max_depth = 4;
  std::size_t total_violations = 0;
  for (int k = 0; k < 60; ++k) {
    FiniteInstance inst = random_instance(rng, ranges, "broken");
    if (inst.depth() < 3) continue;
    Rng crng = rng.split(static_cast<std::uint64_t>(k));
    MonotonicityResult res =
        monotonicity_check_explicit(corrupted_split_classes(inst, crng), inst);
    total_violations += res.violations;
    CHECK(res.violations == res.witnesses.size());
    for (const auto& w : res.witnesses) CHECK(w.i < w.j);
  }
  // the fault injection must actually trip the detector somewhere
  CHECK(total_violations > 0);
}

TEST_CASE("bound report serializes to json") {
  FiniteInstance inst = threshold_instance();
  BoundReport rep = bound_report(inst, 1, 1, 0);
  std::string j = rep.to_json();
  CHECK(j.find("composed") != std::string::npos);
  CHECK(j.find("main") != std::string::npos);
  CHECK(j.find("tighter") != std::string::npos);
}
