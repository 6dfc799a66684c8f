#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dalab/dataset.hpp"
#include "dalab/net.hpp"
#include "dalab/schedule.hpp"

namespace dalab {

struct TrainConfig {
  std::vector<std::size_t> widths;        // input, hidden..., K
  std::size_t split_index = 1;            // DANN alignment layer
  std::vector<std::size_t> aligned_layers;  // MDM layer set L (1-based)
  WeightScheme scheme = WeightScheme::uniform;
  double alpha0 = 0.1;
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  double disc_lr = 0.0;                    // 0 -> use lr
  std::uint64_t seed = 0;
  std::size_t patience = 0;               // 0 disables early termination
  double val_fraction = 0.2;
  std::vector<std::size_t> disc_hidden = {256, 256};
  std::size_t linear_prefix = 0;          // leading layers without ReLU
  std::vector<std::size_t> linear_layers;  // 1-based layers without ReLU
  double init_scale = 1.0;                 // multiplies the Xavier bound
};

struct EpochRow {
  std::size_t epoch = 0;
  double src_train_err = 0.0;
  double src_val_err = 0.0;
  double tgt_err = 0.0;                    // observational only
  double alpha = 0.0;
  std::vector<double> disc_loss;           // per aligned layer
  std::vector<double> proxy_div;           // per aligned layer
};

struct TrainReport {
  std::vector<std::size_t> aligned_layers;
  std::vector<EpochRow> epochs;
  std::size_t selected_epoch = 0;          // argmin of src_val_err
  double selected_src_val_err = 1.0;
  double selected_tgt_err = 1.0;
  double final_tgt_err = 1.0;
  bool diverged = false;
  double wall_ms = 0.0;

  void to_csv(const std::string& path) const;
  // recomputes the early-stopping choice from the logged rows
  std::size_t recompute_selected_epoch() const;
};

struct TrainResult {
  LayeredNet net;
  TrainReport report;
};

// Single-layer adversarial alignment at config.split_index with the
// progressive schedule alpha(p) = alpha_schedule(p, alpha0).
TrainResult dann_train(const TrainConfig& config, const DomainDataset& source,
                       const DomainDataset& target);

// Multilayer divergence minimization over config.aligned_layers with
// per-layer weights from config.scheme.
TrainResult mdm_train(const TrainConfig& config, const DomainDataset& source,
                      const DomainDataset& target);

}  // namespace dalab
