#include <cmath>

#include "doctest.h"

#include "dalab/adam.hpp"

using namespace dalab;

TEST_CASE("zero gradient leaves parameters unchanged") {
  ParamMap params = {{"w", Tensor({2}, {1.0, -2.0})}};
  ParamMap grads = {{"w", Tensor({2}, {0.0, 0.0})}};
  Adam opt;
  opt.step(params, grads);
  CHECK(params["w"][0] == 1.0);
  CHECK(params["w"][1] == -2.0);
  CHECK(opt.steps_taken() == 1);
}

TEST_CASE("first step magnitude is about lr, direction is -sign(g)") {
  ParamMap params = {{"w", Tensor({1}, {0.0})}};
  ParamMap grads = {{"w", Tensor({1}, {3.7})}};
  Adam opt(AdamConfig{1e-3, 0.9, 0.999, 1e-8});
  opt.step(params, grads);
  // m-hat = g, v-hat = g^2, so the step is lr * g / (|g| + eps) ~ lr
  CHECK(params["w"][0] == doctest::Approx(-1e-3).epsilon(1e-6));
}

TEST_CASE("two steps on f(w)=w^2 match a scalar reference to 1e-12") {
  // hand-rolled scalar Adam
  double w_ref = 1.0, m = 0.0, v = 0.0;
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int t = 1; t <= 2; ++t) {
    double g = 2.0 * w_ref;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    double mhat = m / (1.0 - std::pow(b1, t));
    double vhat = v / (1.0 - std::pow(b2, t));
    w_ref -= lr * mhat / (std::sqrt(vhat) + eps);
  }

  ParamMap params = {{"w", Tensor({1}, {1.0})}};
  Adam opt(AdamConfig{lr, b1, b2, eps});
  for (int t = 0; t < 2; ++t) {
    ParamMap grads = {{"w", Tensor({1}, {2.0 * params["w"][0]})}};
    opt.step(params, grads);
  }
  CHECK(std::abs(params["w"][0] - w_ref) < 1e-12);
}

TEST_CASE("missing gradient key and shape mismatch are rejected") {
  ParamMap params = {{"w", Tensor({2}, {1.0, 2.0})}};
  Adam opt;
  CHECK_THROWS(opt.step(params, {}));
  ParamMap bad = {{"w", Tensor({3}, {0.0, 0.0, 0.0})}};
  CHECK_THROWS(opt.step(params, bad));
}

TEST_CASE("non-finite gradient is rejected before mutating parameters") {
  ParamMap params = {{"w", Tensor({1}, {5.0})}};
  ParamMap grads = {{"w", Tensor({1}, {std::nan("")})}};
  Adam opt;
  CHECK_THROWS(opt.step(params, grads));
  CHECK(params["w"][0] == 5.0);
}
