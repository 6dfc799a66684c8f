#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dalab/rng.hpp"
#include "dalab/tensor.hpp"

namespace dalab {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DomainTag { source, target };

struct DomainDataset {
  Tensor features;           // (n, d)
  std::vector<int> labels;   // values in [0, K)
  DomainTag domain = DomainTag::source;
  std::uint64_t seed = 0;

  std::size_t size() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }
  int num_classes() const;
  double label_frequency(int label) const;
};

enum class GeneratorKind { figure1_toy, moons_shift, gaussian_shift };

GeneratorKind generator_kind_from_string(const std::string& s);

struct ToyShiftConfig {
  double epsilon = 0.1;          // label-marginal shift, in [0, 0.5)
  std::size_t n_per_domain = 1000;
  double cluster_separation = 4.0;
  double noise_sigma = 0.25;
};

struct MoonsShiftConfig {
  double rotation_deg = 30.0;    // target = source rotated by this angle
  double epsilon = 0.0;          // optional label-marginal resampling
  std::size_t n_per_domain = 1000;
  double noise_sigma = 0.1;
};

struct GaussianShiftConfig {
  double shift = 2.0;            // translation of target cluster means
  double epsilon = 0.0;
  std::size_t n_per_domain = 1000;
  std::size_t dim = 2;
  double cluster_separation = 4.0;
  double noise_sigma = 0.5;
};

// Four 2D clusters, two per domain, disjoint supports across domains when
// noise_sigma is small relative to cluster_separation. Label marginals:
// p_S(y=1) = 0.5 + eps, p_T(y=1) = 0.5 - eps, so the gap is 2*eps.
std::pair<DomainDataset, DomainDataset> generate_figure1_toy(
    const ToyShiftConfig& cfg, std::uint64_t seed);

// Interleaving half-moons; target is the source geometry rotated about the
// moons' midpoint.
std::pair<DomainDataset, DomainDataset> generate_moons_shift(
    const MoonsShiftConfig& cfg, std::uint64_t seed);

// Two spherical Gaussian clusters per domain; target means translated.
std::pair<DomainDataset, DomainDataset> generate_gaussian_shift(
    const GaussianShiftConfig& cfg, std::uint64_t seed);

// CSV schema: UTF-8, header "label,f0,...,f{d-1}", one sample per row.
DomainDataset load_csv(const std::string& path);
void save_csv(const DomainDataset& ds, const std::string& path);

// Disjoint seeded partition; validation gets ceil(n * val_fraction) rows.
std::pair<DomainDataset, DomainDataset> train_val_split(
    const DomainDataset& ds, double val_fraction, std::uint64_t seed);

// Minimum Euclidean distance between the two datasets' points.
double min_cross_distance(const DomainDataset& a, const DomainDataset& b);

}  // namespace dalab
