#include <cmath>

#include "doctest.h"

#include "dalab/schedule.hpp"

using namespace dalab;

TEST_CASE("alpha_schedule endpoint values") {
  CHECK(alpha_schedule(0.0, 1.0) == 0.0);
  CHECK(alpha_schedule(1.0, 1.0) == doctest::Approx(0.9999092).epsilon(1e-6));
  CHECK(alpha_schedule(0.1, 1.0) == doctest::Approx(0.4621172).epsilon(1e-6));
  CHECK_THROWS(alpha_schedule(-0.01, 1.0));
  CHECK_THROWS(alpha_schedule(1.01, 1.0));
}

TEST_CASE("alpha_schedule equals tanh(5p), monotone on a grid") {
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    double p = static_cast<double>(i) / 1000.0;
    double a = alpha_schedule(p, 1.0);
    CHECK(std::abs(a - std::tanh(5.0 * p)) <= 1e-12);
    CHECK(a >= prev);
    prev = a;
  }
}

TEST_CASE("uniform weights split alpha0 evenly") {
  auto w = layer_weights(WeightScheme::uniform, 0.1, 4, 0.5);
  REQUIRE(w.size() == 4);
  double sum = 0.0;
  for (double v : w) {
    CHECK(v == doctest::Approx(0.025).epsilon(1e-12));
    sum += v;
  }
  CHECK(std::abs(sum - 0.1) <= 1e-12);
}

TEST_CASE("linear weights decrease by alpha0/|L| per layer") {
  auto w = layer_weights(WeightScheme::linear, 0.1, 4, 0.0);
  REQUIRE(w.size() == 4);
  CHECK(w[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.075).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(w[3] == doctest::Approx(0.025).epsilon(1e-12));
}

TEST_CASE("exponential weights use c(p) = 2p") {
  auto w = layer_weights(WeightScheme::exponential, 0.1, 3, 1.0);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.1 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(0.1 * std::exp(-4.0)).epsilon(1e-12));
  // p = 0 collapses to constant alpha0
  auto w0 = layer_weights(WeightScheme::exponential, 0.1, 3, 0.0);
  for (double v : w0) CHECK(v == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("all schemes produce nonnegative weights") {
  for (auto scheme :
       {WeightScheme::uniform, WeightScheme::linear, WeightScheme::exponential})
    for (double p : {0.0, 0.3, 1.0})
      for (double v : layer_weights(scheme, 0.2, 5, p)) CHECK(v >= 0.0);
}

TEST_CASE("scheme name roundtrip") {
  for (auto scheme :
       {WeightScheme::uniform, WeightScheme::linear, WeightScheme::exponential})
    CHECK(weight_scheme_from_string(to_string(scheme)) == scheme);
  CHECK_THROWS(weight_scheme_from_string("quadratic"));
}
