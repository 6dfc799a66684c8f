#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dalab/bounds.hpp"
#include "dalab/dataset.hpp"
#include "dalab/divergence.hpp"
#include "dalab/finite.hpp"
#include "dalab/sweep.hpp"
#include "dalab/train.hpp"

namespace fs = std::filesystem;
using namespace dalab;

namespace {

bool params_equal(const ParamMap& a, const ParamMap& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [k, t] : a) {
    auto it = b.find(k);
    if (it == b.end() || t.size() != it->second.size()) return false;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] != it->second[i]) return false;
  }
  return true;
}

// single run from an experiment config; returns the trained result
TrainResult single_run(const ExperimentConfig& cfg, std::uint64_t seed,
                       const DomainDataset& src, const DomainDataset& tgt) {
  TrainConfig t;
  std::size_t total = cfg.encoder_depth + cfg.predictor_depth;
  t.widths.push_back(src.dim());
  for (std::size_t k = 0; k + 1 < total; ++k)
    t.widths.push_back(cfg.hidden_width);
  t.widths.push_back(std::max(
      2, std::max(src.num_classes(), tgt.num_classes())));
  t.split_index = cfg.encoder_depth;
  t.scheme = cfg.scheme;
  t.alpha0 = cfg.alpha0;
  t.epochs = cfg.epochs;
  t.batch_size = cfg.batch_size;
  t.lr = cfg.lr;
  t.seed = seed;
  t.patience = cfg.patience;
  t.val_fraction = cfg.val_fraction;
  t.disc_hidden = cfg.disc_hidden;
  if (cfg.objective == "mdm") {
    t.aligned_layers = cfg.aligned_layers;
    if (t.aligned_layers.empty())
      for (std::size_t i = 1; i < total; ++i) t.aligned_layers.push_back(i);
    return mdm_train(t, src, tgt);
  }
  return dann_train(t, src, tgt);
}

int run_train(const std::string& config_path, const std::string& objective,
              std::uint64_t seed, bool seed_set, const std::string& out,
              bool audit) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  cfg.objective = objective;
  if (!out.empty()) cfg.out_dir = out;
  std::uint64_t run_seed = seed_set ? seed : cfg.seeds.front();
  fs::create_directories(cfg.out_dir);

  auto [src, tgt] = make_datasets(cfg.dataset, run_seed);
  TrainResult res = single_run(cfg, run_seed, src, tgt);
  res.report.to_csv(cfg.out_dir + "/report.csv");
  res.net.save(cfg.out_dir + "/model.net");
  std::printf("selected_epoch=%zu src_val_err=%.6f tgt_err=%.6f%s\n",
              res.report.selected_epoch, res.report.selected_src_val_err,
              res.report.selected_tgt_err,
              res.report.diverged ? " DIVERGED" : "");

  if (audit) {
    // target labels must not influence training or selection: rerun with
    // permuted target labels and demand the identical selected model
    DomainDataset tgt2 = tgt;
    Rng perm = Rng(run_seed).split(0xa0d17);
    perm.shuffle(tgt2.labels);
    TrainResult res2 = single_run(cfg, run_seed, src, tgt2);
    bool same = params_equal(res.net.params(), res2.net.params()) &&
                res.report.selected_epoch == res2.report.selected_epoch;
    std::printf("audit: %s\n", same ? "selected model identical under "
                                      "permuted target labels"
                                    : "MISMATCH — target labels leaked");
    if (!same) return 1;
  }
  return res.report.diverged ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale domain adaptation laboratory"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a shifted dataset pair");
  std::string gen_kind = "moons_shift", gen_out = "out";
  std::uint64_t gen_seed = 1;
  DatasetSpec gen_spec;
  gen->add_option("--kind", gen_kind, "figure1_toy | moons_shift | gaussian_shift");
  gen->add_option("--epsilon", gen_spec.epsilon, "label-marginal shift");
  gen->add_option("--n", gen_spec.n_per_domain, "samples per domain");
  gen->add_option("--separation", gen_spec.cluster_separation);
  gen->add_option("--noise", gen_spec.noise_sigma);
  gen->add_option("--rotation", gen_spec.rotation_deg);
  gen->add_option("--shift", gen_spec.shift);
  gen->add_option("--dim", gen_spec.dim);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out, "output directory");

  // train / mdm
  auto* train = app.add_subcommand("train", "single DANN training run");
  auto* mdm = app.add_subcommand("mdm", "single multilayer alignment run");
  std::string t_config, t_out;
  std::uint64_t t_seed = 0;
  bool t_audit = false;
  for (auto* sub : {train, mdm}) {
    sub->add_option("--config", t_config, "experiment config (JSON)")->required();
    sub->add_option("--seed", t_seed);
    sub->add_option("--out", t_out);
    sub->add_flag("--audit", t_audit,
                  "rerun with permuted target labels and compare models");
  }

  // sweep
  auto* sweep = app.add_subcommand("sweep", "axis x seeds experiment sweep");
  std::string s_config, s_out;
  std::size_t s_jobs = 1;
  sweep->add_option("--config", s_config, "experiment config (JSON)")->required();
  sweep->add_option("--jobs", s_jobs, "parallel runs");
  sweep->add_option("--out", s_out);

  // divergence
  auto* dvg = app.add_subcommand("divergence",
                                 "exact divergence on a finite instance");
  std::string d_instance, d_flavor = "hdh", d_out;
  std::size_t d_split = 1, d_gindex = 0, d_budget = kDefaultEnumerationBudget;
  dvg->add_option("--instance", d_instance, "finite instance (JSON)")->required();
  dvg->add_option("--flavor", d_flavor, "hdh | f_latent | f_gdg | fg_dfg");
  dvg->add_option("--split", d_split);
  dvg->add_option("--g-index", d_gindex, "fixed encoder for f_latent");
  dvg->add_option("--budget", d_budget);
  dvg->add_option("--out", d_out, "write estimate JSON here too");

  // certify-bounds
  auto* cert = app.add_subcommand("certify-bounds",
                                  "bound + monotonicity campaign");
  CertifyConfig cc;
  bool cert_corrupt = false;
  cert->add_option("--instances", cc.instances);
  cert->add_option("--seed", cc.seed);
  cert->add_option("--budget", cc.budget);
  cert->add_option("--max-depth", cc.ranges.max_depth);
  cert->add_option("--max-space", cc.ranges.max_space);
  cert->add_option("--max-funcs", cc.ranges.max_funcs_per_layer);
  cert->add_option("--max-points", cc.ranges.max_points);
  cert->add_option("--out", cc.out_dir);
  cert->add_flag("--inject-corruption", cert_corrupt,
                 "break class nesting to demonstrate violation detection");

  // report
  auto* rep = app.add_subcommand("report", "rebuild aggregate + chart from raw CSV");
  std::string r_raw, r_out = "out";
  rep->add_option("--raw", r_raw, "raw.csv from a sweep")->required();
  rep->add_option("--out", r_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      gen_spec.kind = gen_kind;
      auto [src, tgt] = make_datasets(gen_spec, gen_seed);
      fs::create_directories(gen_out);
      save_csv(src, gen_out + "/source.csv");
      save_csv(tgt, gen_out + "/target.csv");
      std::printf("wrote %s/source.csv and %s/target.csv (%zu + %zu rows)\n",
                  gen_out.c_str(), gen_out.c_str(), src.size(), tgt.size());
      return 0;
    }
    if (train->parsed() || mdm->parsed()) {
      return run_train(t_config, train->parsed() ? "dann" : "mdm", t_seed,
                       train->count("--seed") > 0 || mdm->count("--seed") > 0,
                       t_out, t_audit);
    }
    if (sweep->parsed()) {
      ExperimentConfig cfg = ExperimentConfig::load(s_config);
      if (!s_out.empty()) cfg.out_dir = s_out;
      SweepResult result = run_experiment(cfg, s_jobs);
      std::size_t failed = 0;
      for (const auto& r : result.raw) failed += r.failed ? 1 : 0;
      std::printf("%zu runs (%zu failed), results in %s\n", result.raw.size(),
                  failed, cfg.out_dir.c_str());
      return 0;
    }
    if (dvg->parsed()) {
      FiniteInstance inst = FiniteInstance::load(d_instance);
      DivergenceEstimate est =
          exact_divergence(divergence_flavor_from_string(d_flavor), inst,
                           d_split, d_gindex, d_budget);
      nlohmann::json j = {{"value", est.value},
                          {"flavor", est.flavor},
                          {"class_size_f", est.class_size_f},
                          {"class_size_g", est.class_size_g},
                          {"n_src", est.n_src},
                          {"n_tgt", est.n_tgt},
                          {"pairs_evaluated", est.pairs_evaluated}};
      std::string text = j.dump(2);
      std::printf("%s\n", text.c_str());
      if (!d_out.empty()) {
        std::ofstream out(d_out);
        out << text << "\n";
      }
      return 0;
    }
    if (cert->parsed()) {
      cc.inject_corruption = cert_corrupt;
      CertifySummary s = certify_bounds(cc);
      std::printf("instances=%zu pairs=%zu composed=%zu main=%zu min_split=%zu "
                  "monotonicity=%zu\n",
                  s.instances, s.pairs_checked, s.composed_violations,
                  s.main_violations, s.min_split_violations,
                  s.monotonicity_violations);
      if (s.total_violations() > 0) {
        std::printf("VIOLATIONS FOUND: %zu (see %s/monotonicity_witnesses.csv"
                    " and %s/bounds_summary.csv)\n",
                    s.total_violations(), cc.out_dir.c_str(),
                    cc.out_dir.c_str());
        return 2;
      }
      return 0;
    }
    if (rep->parsed()) {
      regenerate_report(r_raw, r_out);
      std::printf("rebuilt aggregate.csv and sweep.svg in %s\n", r_out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
