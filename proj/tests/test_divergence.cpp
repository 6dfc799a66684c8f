#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "oracles.hpp"

#include "dalab/divergence.hpp"
#include "dalab/rng.hpp"

using namespace dalab;

namespace {

// X = {0,1,2}, H = thresholds 1[x >= t] for t in {0,1,2,3}
FunctionSet threshold_class() {
  FunctionSet H;
  for (int t = 0; t <= 3; ++t) {
    FiniteFunction h(3);
    for (int x = 0; x < 3; ++x) h[static_cast<std::size_t>(x)] = x >= t ? 1 : 0;
    H.push_back(h);
  }
  return H;
}

}  // namespace

TEST_CASE("threshold instance: hdh divergence is 0.5") {
  std::vector<int> S = {0, 1}, T = {1, 2};
  CHECK(hdh_divergence(threshold_class(), S, T) == 0.5);
}

TEST_CASE("identical sample multisets give zero divergence, all flavors") {
  Rng rng(31);
  InstanceRanges ranges;
  for (int k = 0; k < 10; ++k) {
    FiniteInstance inst = random_instance(rng, ranges, "same");
    inst.tgt_points = inst.src_points;
    inst.tgt_labels = inst.src_labels;
    for (std::size_t i = 1; i < inst.depth(); ++i) {
      CHECK(exact_divergence(DivergenceFlavor::hdh, inst, i).value == 0.0);
      CHECK(exact_divergence(DivergenceFlavor::f_gdg, inst, i).value == 0.0);
      CHECK(exact_divergence(DivergenceFlavor::f_latent, inst, i, 0).value == 0.0);
    }
  }
}

TEST_CASE("singleton classes give zero divergence") {
  FunctionSet H = {FiniteFunction{0, 1, 1}};
  std::vector<int> S = {0, 1}, T = {1, 2};
  CHECK(hdh_divergence(H, S, T) == 0.0);
  FunctionSet G = {FiniteFunction{0, 0, 1}};
  CHECK(f_gdg_divergence(H, G, S, T) == 0.0);  // g = g' forced
}

TEST_CASE("exact flavors are symmetric in S and T") {
  Rng rng(77);
  InstanceRanges ranges;
  for (int k = 0; k < 20; ++k) {
    FiniteInstance inst = random_instance(rng, ranges, "sym");
    for (std::size_t i = 1; i < inst.depth(); ++i) {
      auto F = inst.compose_predictors(i);
      auto G = inst.compose_encoders(i);
      CHECK(f_gdg_divergence(F, G, inst.src_points, inst.tgt_points) ==
            f_gdg_divergence(F, G, inst.tgt_points, inst.src_points));
      auto H = inst.compose_encoders(inst.depth());
      CHECK(hdh_divergence(H, inst.src_points, inst.tgt_points) ==
            hdh_divergence(H, inst.tgt_points, inst.src_points));
    }
  }
}

TEST_CASE("dominance: f_gdg <= fg_dfg on every instance") {
  Rng rng(13);
  InstanceRanges ranges;
  for (int k = 0; k < 30; ++k) {
    FiniteInstance inst = random_instance(rng, ranges, "dom");
    for (std::size_t i = 1; i < inst.depth(); ++i) {
      double dfgdg = exact_divergence(DivergenceFlavor::f_gdg, inst, i).value;
      double dfgdfg = exact_divergence(DivergenceFlavor::fg_dfg, inst, i).value;
      CHECK(dfgdg <= dfgdfg);
    }
  }
}

TEST_CASE("removing functions never increases a divergence") {
  Rng rng(19);
  InstanceRanges ranges;
  for (int k = 0; k < 20; ++k) {
    FiniteInstance inst = random_instance(rng, ranges, "mono");
    auto H = inst.compose_encoders(inst.depth());
    if (H.size() < 2) continue;
    double full = hdh_divergence(H, inst.src_points, inst.tgt_points);
    FunctionSet smaller(H.begin(), H.end() - 1);
    CHECK(hdh_divergence(smaller, inst.src_points, inst.tgt_points) <= full);
  }
}

TEST_CASE("optimized enumeration equals the naive triple loop bit-identically") {
  Rng rng(101);
  InstanceRanges ranges;
  for (int k = 0; k < 50; ++k) {
    FiniteInstance inst = random_instance(rng, ranges, "oracle");
    auto H = inst.compose_encoders(inst.depth());
    CHECK(hdh_divergence(H, inst.src_points, inst.tgt_points) ==
          oracle::naive_hdh(H, inst.src_points, inst.tgt_points));
    for (std::size_t i = 1; i < inst.depth(); ++i) {
      auto F = inst.compose_predictors(i);
      auto G = inst.compose_encoders(i);
      CHECK(f_gdg_divergence(F, G, inst.src_points, inst.tgt_points) ==
            oracle::naive_fgdg(F, G, inst.src_points, inst.tgt_points));
      CHECK(latent_divergence(F, G[0], inst.src_points, inst.tgt_points) ==
            oracle::naive_latent(F, G[0], inst.src_points, inst.tgt_points));
    }
  }
}

TEST_CASE("enumeration budget is enforced, not subsampled") {
  FunctionSet H(100, FiniteFunction{0, 1, 1});
  std::vector<int> S = {0}, T = {1};
  CHECK_THROWS_AS(hdh_divergence(H, S, T, 100), BudgetError);
}

TEST_CASE("instance json roundtrip") {
  Rng rng(55);
  InstanceRanges ranges;
  FiniteInstance inst = random_instance(rng, ranges, "rt");
  FiniteInstance back = FiniteInstance::from_json(inst.to_json());
  CHECK(back.id == inst.id);
  CHECK(back.space_sizes == inst.space_sizes);
  CHECK(back.layers == inst.layers);
  CHECK(back.src_points == inst.src_points);
  CHECK(back.tgt_labels == inst.tgt_labels);
}

TEST_CASE("proxy divergence: formula, indistinguishable and separated clouds") {
  CHECK(proxy_a_from_error(0.25) == 1.0);
  CHECK(proxy_a_from_error(0.75) == 0.0);  // clamped

  Rng rng(3);
  Tensor a({200, 2}), b({200, 2}), far({200, 2});
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.normal();
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = rng.normal();
  for (std::size_t i = 0; i < far.size(); ++i) far[i] = rng.normal() + 50.0;

  ProxyConfig cfg;
  cfg.epochs = 40;
  ProxyEstimate same = proxy_divergence(a, b, cfg, 1);
  CHECK(same.proxy_a <= 0.2);
  ProxyEstimate apart = proxy_divergence(a, far, cfg, 1);
  CHECK(apart.heldout_err <= 0.02);
  CHECK(apart.proxy_a >= 1.9);

  Tensor tiny({5, 2});
  CHECK_THROWS(proxy_divergence(tiny, a, cfg, 1));
}
