#include "dalab/schedule.hpp"

namespace dalab {

WeightScheme weight_scheme_from_string(const std::string& s) {
  if (s == "uniform") return WeightScheme::uniform;
  if (s == "linear") return WeightScheme::linear;
  if (s == "exponential") return WeightScheme::exponential;
  throw std::runtime_error("unknown weighting scheme: " + s);
}

std::string to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::uniform: return "uniform";
    case WeightScheme::linear: return "linear";
    case WeightScheme::exponential: return "exponential";
  }
  return "?";
}

std::vector<double> layer_weights(WeightScheme scheme, double alpha0,
                                  std::size_t num_layers, double progress) {
  if (alpha0 < 0.0) throw std::runtime_error("layer_weights: alpha0 < 0");
  if (num_layers == 0) throw std::runtime_error("layer_weights: empty layer set");
  if (progress < 0.0 || progress > 1.0)
    throw std::runtime_error("layer_weights: progress must be in [0, 1]");

  std::vector<double> w(num_layers);
  double m = static_cast<double>(num_layers);
  switch (scheme) {
    case WeightScheme::uniform:
      for (auto& wi : w) wi = alpha0 / m;
      break;
    case WeightScheme::linear:
      for (std::size_t k = 0; k < num_layers; ++k)
        w[k] = alpha0 * (m - static_cast<double>(k)) / m;
      break;
    case WeightScheme::exponential: {
      double c = 2.0 * progress;
      for (std::size_t k = 0; k < num_layers; ++k)
        w[k] = alpha0 * std::exp(-c * static_cast<double>(k));
      break;
    }
  }
  return w;
}

}  // namespace dalab
