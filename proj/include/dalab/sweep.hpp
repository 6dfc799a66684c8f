#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dalab/bounds.hpp"
#include "dalab/dataset.hpp"
#include "dalab/train.hpp"

namespace dalab {

enum class SweepAxis { none, encoder_depth, split_layer, hidden_width, predictor_depth };

SweepAxis sweep_axis_from_string(const std::string& s);
std::string to_string(SweepAxis a);

struct DatasetSpec {
  std::string kind = "moons_shift";  // generator name or "csv"
  std::string source_csv, target_csv;
  double epsilon = 0.0;
  std::size_t n_per_domain = 1000;
  double cluster_separation = 4.0;
  double noise_sigma = 0.1;
  double rotation_deg = 30.0;
  double shift = 2.0;
  std::size_t dim = 2;
};

struct ExperimentConfig {
  std::string objective = "dann";   // "dann" or "mdm"
  DatasetSpec dataset;
  std::size_t encoder_depth = 2;    // layers in the encoder
  std::size_t predictor_depth = 2;  // layers in the predictor (incl. head)
  std::size_t hidden_width = 64;
  std::vector<std::size_t> aligned_layers;  // MDM; empty = all 1..N-1
  WeightScheme scheme = WeightScheme::uniform;
  double alpha0 = 0.1;
  std::size_t epochs = 40;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  std::size_t patience = 0;
  double val_fraction = 0.2;
  std::vector<std::size_t> disc_hidden = {64, 64};
  SweepAxis axis = SweepAxis::none;
  std::vector<std::size_t> axis_values;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string out_dir = "out";

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  void validate() const;
};

struct RunRow {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  double src_err = 1.0;
  double tgt_err = 1.0;
  std::size_t selected_epoch = 0;
  double wall_ms = 0.0;
  bool failed = false;
};

struct AggregateRow {
  double axis_value = 0.0;
  double tgt_err_mean = 0.0, tgt_err_std = 0.0;
  double src_err_mean = 0.0, src_err_std = 0.0;
  std::size_t n_seeds = 0;
};

struct SweepResult {
  std::vector<RunRow> raw;          // sorted by (axis_value, seed)
  std::vector<AggregateRow> aggregate;
};

std::vector<AggregateRow> aggregate_runs(const std::vector<RunRow>& raw);

// Executes axis_values x seeds training runs (jobs in parallel), writes
// raw.csv, aggregate.csv, sweep.svg, timing.csv and the resolved config
// into config.out_dir. Raw and aggregate CSVs contain no timing, so reruns
// with the same config are byte-identical.
SweepResult run_experiment(const ExperimentConfig& config, std::size_t jobs = 1);

// Rebuilds aggregate.csv and sweep.svg from a raw.csv alone.
void regenerate_report(const std::string& raw_csv, const std::string& out_dir);

struct CertifyConfig {
  std::size_t instances = 100;
  InstanceRanges ranges;
  std::uint64_t seed = 7;
  bool inject_corruption = false;  // breaks class nesting on every instance
  std::size_t budget = kDefaultEnumerationBudget;
  std::string out_dir = "out";
};

struct CertifySummary {
  std::size_t instances = 0;
  std::size_t pairs_checked = 0;
  std::size_t composed_violations = 0;
  std::size_t main_violations = 0;
  std::size_t min_split_violations = 0;
  std::size_t monotonicity_violations = 0;
  std::size_t total_violations() const {
    return composed_violations + main_violations + min_split_violations +
           monotonicity_violations;
  }
};

// Generates random finite instances, verifies the split bound and the
// composed-class bound over every (f, g) pair at every split, the
// layer-agnostic minimum, and both monotonicity inequalities. Emits
// bounds_summary.csv and monotonicity_summary.csv.
CertifySummary certify_bounds(const CertifyConfig& config);

std::pair<DomainDataset, DomainDataset> make_datasets(const DatasetSpec& spec,
                                                      std::uint64_t seed);

}  // namespace dalab
