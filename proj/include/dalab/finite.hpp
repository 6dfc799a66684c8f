#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dalab/rng.hpp"

namespace dalab {

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Extensional function between finite index sets: table[x] is the output
// code for input x.
using FiniteFunction = std::vector<int>;
using FunctionSet = std::vector<FiniteFunction>;

// A layered class of finite functions. Layer k (1-based) maps the space of
// size space_sizes[k-1] to the space of size space_sizes[k]. The derived
// encoder class G_i and predictor class F_i at a split arise by composing
// per-layer sets, exactly as an N-layer net decomposes into g_i and f_i.
// Samples are multisets of input-space points with class labels.
struct FiniteInstance {
  std::string id;
  std::vector<std::size_t> space_sizes;        // m_0 .. m_N
  std::vector<FunctionSet> layers;             // N layers
  std::vector<int> src_points, tgt_points;     // indices into space 0
  std::vector<int> src_labels, tgt_labels;     // values in [0, m_N)

  std::size_t depth() const { return layers.size(); }
  void validate() const;

  // |G_i| / |F_i| without materializing them
  std::size_t encoder_class_size(std::size_t split) const;
  std::size_t predictor_class_size(std::size_t split) const;

  // G_i: all compositions layer_i o ... o layer_1, tables over space 0.
  // Enumeration order is lexicographic in per-layer indices (layer 1
  // slowest), so it is deterministic.
  FunctionSet compose_encoders(std::size_t split) const;
  // F_i: all compositions layer_N o ... o layer_{i+1}, tables over space i.
  FunctionSet compose_predictors(std::size_t split) const;

  std::string to_json() const;
  static FiniteInstance from_json(const std::string& text);
  void save(const std::string& path) const;
  static FiniteInstance load(const std::string& path);
};

struct InstanceRanges {
  std::size_t max_depth = 4;          // layers, >= 2
  std::size_t max_space = 4;          // intermediate space sizes in [2, max]
  std::size_t max_funcs_per_layer = 3;
  std::size_t max_points = 16;        // per domain
  std::size_t num_classes = 2;
};

FiniteInstance random_instance(Rng& rng, const InstanceRanges& ranges,
                               const std::string& id);

// empirical risks on point multisets
double pair_risk(const FiniteFunction& h, const FiniteFunction& h2,
                 const std::vector<int>& points);
double label_risk(const FiniteFunction& h, const std::vector<int>& points,
                  const std::vector<int>& labels);

}  // namespace dalab
