#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dalab {

// Progressive discriminator weight: alpha_max * (2 / (1 + e^{-10p}) - 1),
// which equals alpha_max * tanh(5p). Ramps from 0 at p = 0.
inline double alpha_schedule(double p, double alpha_max) {
  if (p < 0.0 || p > 1.0)
    throw std::runtime_error("alpha_schedule: progress must be in [0, 1]");
  return alpha_max * (2.0 / (1.0 + std::exp(-10.0 * p)) - 1.0);
}

enum class WeightScheme { uniform, linear, exponential };

WeightScheme weight_scheme_from_string(const std::string& s);
std::string to_string(WeightScheme s);

// Per-layer alignment weights for the k-th layer of the aligned set L
// (k = 0 .. |L|-1, ordered by depth):
//   uniform:     alpha0 / |L|
//   linear:      alpha0 * (|L| - k) / |L|
//   exponential: alpha0 * exp(-c(p) * k), with c(p) = 2p ramping over
//                training progress
std::vector<double> layer_weights(WeightScheme scheme, double alpha0,
                                  std::size_t num_layers, double progress);

}  // namespace dalab
