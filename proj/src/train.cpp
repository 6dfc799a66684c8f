#include "dalab/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace dalab {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return Rng(seed ^ (tag * 0xd1342543de82ef95ULL)).next_u64();
}

Tensor gather_rows(const Tensor& m, const std::vector<std::size_t>& idx,
                   std::size_t begin, std::size_t count) {
  Tensor out({count, m.cols()});
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out.at(i, j) = m.at(idx[begin + i], j);
  return out;
}

std::vector<int> gather_labels(const std::vector<int>& labels,
                               const std::vector<std::size_t>& idx,
                               std::size_t begin, std::size_t count) {
  std::vector<int> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = labels[idx[begin + i]];
  return out;
}

double discriminator_error(const Discriminator& disc, const Tensor& src_act,
                           const Tensor& tgt_act) {
  auto ps = disc.net.predict(src_act);
  auto pt = disc.net.predict(tgt_act);
  std::size_t wrong = 0;
  for (int p : ps)
    if (p != 0) ++wrong;
  for (int p : pt)
    if (p != 1) ++wrong;
  return static_cast<double>(wrong) /
         static_cast<double>(ps.size() + pt.size());
}

TrainResult align_train(const TrainConfig& cfg,
                        const std::vector<std::size_t>& aligned,
                        const DomainDataset& source,
                        const DomainDataset& target) {
  auto t_start = std::chrono::steady_clock::now();

  LayeredNet net = [&] {
    if (cfg.linear_prefix == 0 && cfg.linear_layers.empty() &&
        cfg.init_scale == 1.0)
      return LayeredNet::mlp(cfg.widths, derive_seed(cfg.seed, 1));
    auto is_linear = [&](std::size_t k) {
      return k <= cfg.linear_prefix ||
             std::find(cfg.linear_layers.begin(), cfg.linear_layers.end(), k) !=
                 cfg.linear_layers.end();
    };
    std::vector<LayerSpec> specs;
    for (std::size_t k = 1; k < cfg.widths.size(); ++k)
      specs.push_back({cfg.widths[k - 1], cfg.widths[k],
                       !is_linear(k) && k + 1 < cfg.widths.size()});
    return LayeredNet(specs, derive_seed(cfg.seed, 1), cfg.init_scale);
  }();
  std::size_t n_layers = net.depth();
  if (aligned.empty()) throw std::runtime_error("aligned layer set is empty");
  for (std::size_t i : aligned)
    if (i < 1 || i >= n_layers)
      throw std::runtime_error("aligned layer " + std::to_string(i) +
                               " outside [1, N-1]");
  if (cfg.alpha0 < 0.0) throw std::runtime_error("alpha0 must be >= 0");
  if (source.dim() != target.dim())
    throw ShapeError("source/target feature width mismatch");

  auto [src_train, src_val] =
      train_val_split(source, cfg.val_fraction, derive_seed(cfg.seed, 2));

  std::vector<Discriminator> discs;
  std::vector<Adam> disc_opts;
  for (std::size_t k = 0; k < aligned.size(); ++k) {
    std::size_t width = net.specs()[aligned[k] - 1].out;
    discs.emplace_back(width, aligned[k], derive_seed(cfg.seed, 100 + k),
                       cfg.disc_hidden);
    disc_opts.emplace_back(
        AdamConfig{cfg.disc_lr > 0.0 ? cfg.disc_lr : cfg.lr, 0.9, 0.999, 1e-8});
  }
  Adam net_opt(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8});

  Rng shuffle_rng(derive_seed(cfg.seed, 3));
  std::size_t batch = std::min(cfg.batch_size, std::min(src_train.size(), target.size()));
  std::size_t steps_per_epoch = std::max<std::size_t>(1, src_train.size() / batch);
  std::size_t total_steps = cfg.epochs * steps_per_epoch;
  std::size_t max_aligned = *std::max_element(aligned.begin(), aligned.end());

  TrainReport report;
  report.aligned_layers = aligned;

  ParamMap best_params = net.params();
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t steps_done = 0;
  double alpha_now = 0.0;

  std::vector<std::size_t> src_idx(src_train.size()), tgt_idx(target.size());
  for (std::size_t i = 0; i < src_idx.size(); ++i) src_idx[i] = i;
  for (std::size_t i = 0; i < tgt_idx.size(); ++i) tgt_idx[i] = i;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(src_idx);
    shuffle_rng.shuffle(tgt_idx);

    std::vector<double> disc_loss_sum(aligned.size(), 0.0);
    bool failed = false;

    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      double p = static_cast<double>(steps_done) /
                 static_cast<double>(total_steps);
      alpha_now = alpha_schedule(p, 1.0);
      auto weights = layer_weights(cfg.scheme, cfg.alpha0, aligned.size(), p);

      Tensor xs = gather_rows(src_train.features, src_idx, step * batch, batch);
      auto ys = gather_labels(src_train.labels, src_idx, step * batch, batch);
      std::size_t tgt_off = (step * batch) % (target.size() - batch + 1);
      Tensor xt = gather_rows(target.features, tgt_idx, tgt_off, batch);

      try {
        Tape t;
        auto net_pids = net.leaf_params(t);
        int xs_id = t.leaf(xs, "source_batch");
        int xt_id = t.leaf(xt, "target_batch");

        // per-layer source activations; target only up to the deepest
        // aligned layer
        std::vector<int> src_acts(n_layers + 1), tgt_acts(max_aligned + 1);
        src_acts[0] = xs_id;
        tgt_acts[0] = xt_id;
        for (std::size_t k = 1; k <= n_layers; ++k)
          src_acts[k] = net.tape_forward(t, src_acts[k - 1], net_pids, k - 1, k);
        for (std::size_t k = 1; k <= max_aligned; ++k)
          tgt_acts[k] = net.tape_forward(t, tgt_acts[k - 1], net_pids, k - 1, k);

        int total = t.softmax_cross_entropy(src_acts[n_layers], ys);

        std::vector<std::map<std::string, int>> disc_pids(aligned.size());
        std::vector<int> disc_loss_ids(aligned.size());
        for (std::size_t k = 0; k < aligned.size(); ++k) {
          double coeff = alpha_now * weights[k];
          int zs = t.grad_reverse(src_acts[aligned[k]], coeff);
          int zt = t.grad_reverse(tgt_acts[aligned[k]], coeff);
          disc_pids[k] = discs[k].net.leaf_params(t);
          int ls = discs[k].net.tape_forward(t, zs, disc_pids[k], 0,
                                             discs[k].net.depth());
          int lt = discs[k].net.tape_forward(t, zt, disc_pids[k], 0,
                                             discs[k].net.depth());
          int loss_s = t.softmax_cross_entropy(ls, std::vector<int>(batch, 0));
          int loss_t = t.softmax_cross_entropy(lt, std::vector<int>(batch, 1));
          int loss = t.scale(t.add(loss_s, loss_t), 0.5);
          disc_loss_ids[k] = loss;
          total = t.add(total, loss);
        }

        t.backward(total);

        ParamMap net_grads;
        for (const auto& [name, id] : net_pids) net_grads.emplace(name, t.grad(id));
        net_opt.step(net.params(), net_grads);
        for (std::size_t k = 0; k < aligned.size(); ++k) {
          ParamMap g;
          for (const auto& [name, id] : disc_pids[k]) g.emplace(name, t.grad(id));
          disc_opts[k].step(discs[k].net.params(), g);
          disc_loss_sum[k] += t.scalar_value(disc_loss_ids[k]);
        }
      } catch (const NumericError&) {
        failed = true;
        break;
      }
      ++steps_done;
    }

    if (failed) {
      report.diverged = true;
      break;
    }

    EpochRow row;
    row.epoch = epoch;
    row.src_train_err = zero_one_risk(net, src_train);
    row.src_val_err = zero_one_risk(net, src_val);
    row.tgt_err = zero_one_risk(net, target);
    row.alpha = alpha_now;
    auto src_all_acts = net.forward_activations(src_train.features);
    auto tgt_all_acts = net.forward_activations(target.features);
    for (std::size_t k = 0; k < aligned.size(); ++k) {
      row.disc_loss.push_back(disc_loss_sum[k] /
                              static_cast<double>(steps_per_epoch));
      double err = discriminator_error(discs[k], src_all_acts[aligned[k] - 1],
                                       tgt_all_acts[aligned[k] - 1]);
      row.proxy_div.push_back(std::max(0.0, 2.0 * (1.0 - 2.0 * err)));
    }
    report.epochs.push_back(row);

    // ties resolve to the latest epoch so the selected model reflects the
    // matured alignment
    if (row.src_val_err <= best_val) {
      best_val = row.src_val_err;
      best_epoch = epoch;
      best_params = net.params();
    }
    if (cfg.patience > 0 && epoch - best_epoch >= cfg.patience) break;
  }

  net.params() = best_params;
  report.selected_epoch = best_epoch;
  report.selected_src_val_err = best_val;
  if (!report.epochs.empty()) {
    report.selected_tgt_err = report.epochs[best_epoch].tgt_err;
    report.final_tgt_err = report.epochs.back().tgt_err;
  }
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t_start)
                       .count();
  return {std::move(net), std::move(report)};
}

}  // namespace

TrainResult dann_train(const TrainConfig& config, const DomainDataset& source,
                       const DomainDataset& target) {
  TrainConfig cfg = config;
  cfg.scheme = WeightScheme::uniform;
  return align_train(cfg, {config.split_index}, source, target);
}

TrainResult mdm_train(const TrainConfig& config, const DomainDataset& source,
                      const DomainDataset& target) {
  return align_train(config, config.aligned_layers, source, target);
}

std::size_t TrainReport::recompute_selected_epoch() const {
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (const auto& row : epochs)
    if (row.src_val_err <= best_val) {
      best_val = row.src_val_err;
      best = row.epoch;
    }
  return best;
}

void TrainReport::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "epoch,src_train_err,src_val_err,tgt_err,alpha";
  for (std::size_t i : aligned_layers)
    out << ",disc_loss_" << i << ",proxy_div_" << i;
  out << "\n";
  char buf[64];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << ',' << buf;
  };
  for (const auto& row : epochs) {
    out << row.epoch;
    emit(row.src_train_err);
    emit(row.src_val_err);
    emit(row.tgt_err);
    emit(row.alpha);
    for (std::size_t k = 0; k < aligned_layers.size(); ++k) {
      emit(row.disc_loss[k]);
      emit(row.proxy_div[k]);
    }
    out << "\n";
  }
}

}  // namespace dalab
