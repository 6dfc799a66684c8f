#include "dalab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "dalab/svg.hpp"
#include "json.hpp"

namespace dalab {

namespace fs = std::filesystem;

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "none") return SweepAxis::none;
  if (s == "encoder_depth") return SweepAxis::encoder_depth;
  if (s == "split_layer") return SweepAxis::split_layer;
  if (s == "hidden_width") return SweepAxis::hidden_width;
  if (s == "predictor_depth") return SweepAxis::predictor_depth;
  throw std::runtime_error("unknown sweep axis: " + s);
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::none: return "none";
    case SweepAxis::encoder_depth: return "encoder_depth";
    case SweepAxis::split_layer: return "split_layer";
    case SweepAxis::hidden_width: return "hidden_width";
    case SweepAxis::predictor_depth: return "predictor_depth";
  }
  return "?";
}

std::pair<DomainDataset, DomainDataset> make_datasets(const DatasetSpec& spec,
                                                      std::uint64_t seed) {
  if (spec.kind == "csv") {
    auto src = load_csv(spec.source_csv);
    auto tgt = load_csv(spec.target_csv);
    src.domain = DomainTag::source;
    tgt.domain = DomainTag::target;
    return {std::move(src), std::move(tgt)};
  }
  switch (generator_kind_from_string(spec.kind)) {
    case GeneratorKind::figure1_toy:
      return generate_figure1_toy({spec.epsilon, spec.n_per_domain,
                                   spec.cluster_separation, spec.noise_sigma},
                                  seed);
    case GeneratorKind::moons_shift:
      return generate_moons_shift({spec.rotation_deg, spec.epsilon,
                                   spec.n_per_domain, spec.noise_sigma},
                                  seed);
    case GeneratorKind::gaussian_shift:
      return generate_gaussian_shift({spec.shift, spec.epsilon,
                                      spec.n_per_domain, spec.dim,
                                      spec.cluster_separation,
                                      spec.noise_sigma},
                                     seed);
  }
  throw std::runtime_error("unreachable dataset kind");
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["objective"] = objective;
  j["dataset"] = {{"kind", dataset.kind},
                  {"source_csv", dataset.source_csv},
                  {"target_csv", dataset.target_csv},
                  {"epsilon", dataset.epsilon},
                  {"n_per_domain", dataset.n_per_domain},
                  {"cluster_separation", dataset.cluster_separation},
                  {"noise_sigma", dataset.noise_sigma},
                  {"rotation_deg", dataset.rotation_deg},
                  {"shift", dataset.shift},
                  {"dim", dataset.dim}};
  j["net"] = {{"encoder_depth", encoder_depth},
              {"predictor_depth", predictor_depth},
              {"hidden_width", hidden_width}};
  j["mdm"] = {{"aligned_layers", aligned_layers},
              {"scheme", dalab::to_string(scheme)}};
  j["train"] = {{"alpha0", alpha0},
                {"epochs", epochs},
                {"batch_size", batch_size},
                {"lr", lr},
                {"patience", patience},
                {"val_fraction", val_fraction},
                {"disc_hidden", disc_hidden}};
  j["sweep"] = {{"axis", dalab::to_string(axis)}, {"values", axis_values}};
  j["seeds"] = seeds;
  j["out"] = out_dir;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c;
  c.objective = j.value("objective", c.objective);
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    c.dataset.kind = d.value("kind", c.dataset.kind);
    c.dataset.source_csv = d.value("source_csv", c.dataset.source_csv);
    c.dataset.target_csv = d.value("target_csv", c.dataset.target_csv);
    c.dataset.epsilon = d.value("epsilon", c.dataset.epsilon);
    c.dataset.n_per_domain = d.value("n_per_domain", c.dataset.n_per_domain);
    c.dataset.cluster_separation =
        d.value("cluster_separation", c.dataset.cluster_separation);
    c.dataset.noise_sigma = d.value("noise_sigma", c.dataset.noise_sigma);
    c.dataset.rotation_deg = d.value("rotation_deg", c.dataset.rotation_deg);
    c.dataset.shift = d.value("shift", c.dataset.shift);
    c.dataset.dim = d.value("dim", c.dataset.dim);
  }
  if (j.contains("net")) {
    const auto& n = j["net"];
    c.encoder_depth = n.value("encoder_depth", c.encoder_depth);
    c.predictor_depth = n.value("predictor_depth", c.predictor_depth);
    c.hidden_width = n.value("hidden_width", c.hidden_width);
  }
  if (j.contains("mdm")) {
    const auto& m = j["mdm"];
    c.aligned_layers =
        m.value("aligned_layers", std::vector<std::size_t>{});
    c.scheme = weight_scheme_from_string(m.value("scheme", "uniform"));
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    c.alpha0 = t.value("alpha0", c.alpha0);
    c.epochs = t.value("epochs", c.epochs);
    c.batch_size = t.value("batch_size", c.batch_size);
    c.lr = t.value("lr", c.lr);
    c.patience = t.value("patience", c.patience);
    c.val_fraction = t.value("val_fraction", c.val_fraction);
    c.disc_hidden = t.value("disc_hidden", c.disc_hidden);
  }
  if (j.contains("sweep")) {
    c.axis = sweep_axis_from_string(j["sweep"].value("axis", "none"));
    c.axis_values = j["sweep"].value("values", std::vector<std::size_t>{});
  }
  c.seeds = j.value("seeds", c.seeds);
  c.out_dir = j.value("out", c.out_dir);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void ExperimentConfig::validate() const {
  if (objective != "dann" && objective != "mdm")
    throw std::runtime_error("objective must be 'dann' or 'mdm'");
  if (seeds.empty()) throw std::runtime_error("seeds must be non-empty");
  if (encoder_depth < 1 || predictor_depth < 1)
    throw std::runtime_error("encoder/predictor depth must be >= 1");
  if (encoder_depth + predictor_depth < 2)
    throw std::runtime_error("total depth must be >= 2");
  if (axis != SweepAxis::none && axis_values.empty())
    throw std::runtime_error("sweep axis set but no axis values");
  std::size_t total = encoder_depth + predictor_depth;
  if (axis == SweepAxis::split_layer)
    for (std::size_t v : axis_values)
      if (v < 1 || v >= total)
        throw std::runtime_error("split_layer value " + std::to_string(v) +
                                 " outside [1, N-1]");
  if (alpha0 < 0.0) throw std::runtime_error("alpha0 must be >= 0");
}

namespace {

struct RunSpec {
  double axis_value;
  std::uint64_t seed;
  TrainConfig train;
  bool mdm;
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot open " + tmp);
    out << content;
  }
  fs::rename(tmp, path);
}

RunSpec build_run(const ExperimentConfig& cfg, double axis_value,
                  std::uint64_t seed, std::size_t input_dim,
                  std::size_t num_classes) {
  std::size_t enc = cfg.encoder_depth, pred = cfg.predictor_depth;
  std::size_t width = cfg.hidden_width;
  auto v = static_cast<std::size_t>(axis_value);
  switch (cfg.axis) {
    case SweepAxis::none: break;
    case SweepAxis::encoder_depth: enc = v; break;
    case SweepAxis::predictor_depth: pred = v; break;
    case SweepAxis::hidden_width: width = v; break;
    case SweepAxis::split_layer:
      pred = cfg.encoder_depth + cfg.predictor_depth - v;
      enc = v;
      break;
  }
  std::size_t total = enc + pred;

  RunSpec spec;
  spec.axis_value = axis_value;
  spec.seed = seed;
  spec.mdm = cfg.objective == "mdm";

  TrainConfig& t = spec.train;
  t.widths.push_back(input_dim);
  for (std::size_t k = 0; k + 1 < total; ++k) t.widths.push_back(width);
  t.widths.push_back(std::max<std::size_t>(2, num_classes));
  t.split_index = enc;
  if (spec.mdm) {
    t.aligned_layers = cfg.aligned_layers;
    if (t.aligned_layers.empty())
      for (std::size_t i = 1; i < total; ++i) t.aligned_layers.push_back(i);
  }
  t.scheme = cfg.scheme;
  t.alpha0 = cfg.alpha0;
  t.epochs = cfg.epochs;
  t.batch_size = cfg.batch_size;
  t.lr = cfg.lr;
  t.seed = seed;
  t.patience = cfg.patience;
  t.val_fraction = cfg.val_fraction;
  t.disc_hidden = cfg.disc_hidden;
  return spec;
}

std::string raw_csv_text(const std::vector<RunRow>& raw) {
  std::string s = "axis_value,seed,src_err,tgt_err,selected_epoch\n";
  for (const auto& r : raw) {
    s += fmt17(r.axis_value);
    s += "," + std::to_string(r.seed);
    s += "," + (r.failed ? std::string("nan") : fmt17(r.src_err));
    s += "," + (r.failed ? std::string("nan") : fmt17(r.tgt_err));
    s += "," + std::to_string(r.selected_epoch) + "\n";
  }
  return s;
}

std::string aggregate_csv_text(const std::vector<AggregateRow>& agg) {
  std::string s =
      "axis_value,tgt_err_mean,tgt_err_std,src_err_mean,src_err_std,n_seeds\n";
  for (const auto& a : agg) {
    s += fmt17(a.axis_value);
    s += "," + fmt17(a.tgt_err_mean) + "," + fmt17(a.tgt_err_std);
    s += "," + fmt17(a.src_err_mean) + "," + fmt17(a.src_err_std);
    s += "," + std::to_string(a.n_seeds) + "\n";
  }
  return s;
}

void write_sweep_chart(const std::string& path,
                       const std::vector<AggregateRow>& agg,
                       const std::string& axis_name) {
  SvgSeries tgt, src;
  tgt.label = "target error";
  tgt.color = "#d62728";
  src.label = "source error";
  src.color = "#1f77b4";
  for (const auto& a : agg) {
    tgt.x.push_back(a.axis_value);
    tgt.y.push_back(a.tgt_err_mean);
    tgt.band.push_back(a.tgt_err_std);
    src.x.push_back(a.axis_value);
    src.y.push_back(a.src_err_mean);
    src.band.push_back(a.src_err_std);
  }
  write_line_chart(path, "error vs " + axis_name, axis_name, "error",
                   {tgt, src});
}

}  // namespace

std::vector<AggregateRow> aggregate_runs(const std::vector<RunRow>& raw) {
  std::vector<AggregateRow> out;
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t j = i;
    double sum_t = 0, sum_t2 = 0, sum_s = 0, sum_s2 = 0;
    std::size_t n = 0;
    while (j < raw.size() && raw[j].axis_value == raw[i].axis_value) {
      if (!raw[j].failed) {
        sum_t += raw[j].tgt_err;
        sum_t2 += raw[j].tgt_err * raw[j].tgt_err;
        sum_s += raw[j].src_err;
        sum_s2 += raw[j].src_err * raw[j].src_err;
        ++n;
      }
      ++j;
    }
    AggregateRow a;
    a.axis_value = raw[i].axis_value;
    a.n_seeds = n;
    if (n > 0) {
      double dn = static_cast<double>(n);
      a.tgt_err_mean = sum_t / dn;
      a.src_err_mean = sum_s / dn;
      a.tgt_err_std = std::sqrt(std::max(0.0, sum_t2 / dn - a.tgt_err_mean * a.tgt_err_mean));
      a.src_err_std = std::sqrt(std::max(0.0, sum_s2 / dn - a.src_err_mean * a.src_err_mean));
    }
    out.push_back(a);
    i = j;
  }
  return out;
}

SweepResult run_experiment(const ExperimentConfig& config, std::size_t jobs) {
  config.validate();
  fs::create_directories(config.out_dir);
  fs::create_directories(config.out_dir + "/runs");
  atomic_write(config.out_dir + "/config.json", config.to_json() + "\n");

  std::vector<double> values;
  if (config.axis == SweepAxis::none)
    values.push_back(0.0);
  else
    for (std::size_t v : config.axis_values)
      values.push_back(static_cast<double>(v));

  struct Task {
    RunSpec spec;
    RunRow row;
  };
  std::vector<Task> tasks;
  {
    // dataset geometry is axis-independent, so dims can be probed once
    auto [probe_src, probe_tgt] = make_datasets(config.dataset, config.seeds[0]);
    std::size_t dim = probe_src.dim();
    auto classes = static_cast<std::size_t>(
        std::max(probe_src.num_classes(), probe_tgt.num_classes()));
    for (double v : values)
      for (std::uint64_t seed : config.seeds) {
        Task t;
        t.spec = build_run(config, v, seed, dim, classes);
        tasks.push_back(std::move(t));
      }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      Task& task = tasks[i];
      RunRow row;
      row.axis_value = task.spec.axis_value;
      row.seed = task.spec.seed;
      auto t0 = std::chrono::steady_clock::now();
      try {
        auto [src, tgt] = make_datasets(config.dataset, task.spec.seed);
        TrainResult res = task.spec.mdm
                              ? mdm_train(task.spec.train, src, tgt)
                              : dann_train(task.spec.train, src, tgt);
        if (res.report.diverged || res.report.epochs.empty()) {
          row.failed = true;
        } else {
          row.src_err = res.report.selected_src_val_err;
          row.tgt_err = res.report.selected_tgt_err;
          row.selected_epoch = res.report.selected_epoch;
        }
        std::string stem = config.out_dir + "/runs/run_" +
                           std::to_string(static_cast<long long>(row.axis_value)) +
                           "_s" + std::to_string(row.seed);
        res.report.to_csv(stem + ".report.csv.tmp");
        fs::rename(stem + ".report.csv.tmp", stem + ".report.csv");
        res.net.save(stem + ".net.tmp");
        fs::rename(stem + ".net.tmp", stem + ".net");
      } catch (const std::exception&) {
        row.failed = true;
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      task.row = row;
    }
  };
  std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  SweepResult result;
  for (const auto& t : tasks) result.raw.push_back(t.row);
  std::sort(result.raw.begin(), result.raw.end(),
            [](const RunRow& a, const RunRow& b) {
              return a.axis_value != b.axis_value ? a.axis_value < b.axis_value
                                                  : a.seed < b.seed;
            });
  result.aggregate = aggregate_runs(result.raw);

  atomic_write(config.out_dir + "/raw.csv", raw_csv_text(result.raw));
  atomic_write(config.out_dir + "/aggregate.csv",
               aggregate_csv_text(result.aggregate));
  {
    std::string timing = "axis_value,seed,wall_ms\n";
    for (const auto& r : result.raw)
      timing += fmt17(r.axis_value) + "," + std::to_string(r.seed) + "," +
                fmt17(r.wall_ms) + "\n";
    atomic_write(config.out_dir + "/timing.csv", timing);
  }
  write_sweep_chart(config.out_dir + "/sweep.svg", result.aggregate,
                    to_string(config.axis));
  return result;
}

void regenerate_report(const std::string& raw_csv, const std::string& out_dir) {
  std::ifstream in(raw_csv);
  if (!in) throw std::runtime_error("cannot open " + raw_csv);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(raw_csv + ": empty file");
  std::vector<RunRow> raw;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    RunRow r;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    r.axis_value = std::stod(cell);
    std::getline(ss, cell, ',');
    r.seed = std::stoull(cell);
    std::getline(ss, cell, ',');
    r.src_err = std::stod(cell);
    std::getline(ss, cell, ',');
    r.tgt_err = std::stod(cell);
    std::getline(ss, cell, ',');
    r.selected_epoch = std::stoull(cell);
    r.failed = std::isnan(r.src_err);
    raw.push_back(r);
  }
  fs::create_directories(out_dir);
  auto agg = aggregate_runs(raw);
  atomic_write(out_dir + "/aggregate.csv", aggregate_csv_text(agg));
  write_sweep_chart(out_dir + "/sweep.svg", agg, "axis_value");
}

CertifySummary certify_bounds(const CertifyConfig& config) {
  fs::create_directories(config.out_dir);
  Rng rng(config.seed);

  std::string bounds_csv =
      "instance_id,split,f_index,g_index,r_s,r_t,composed_rhs,main_rhs,"
      "min_split_rhs,composed_violated,main_violated,min_split_violated\n";
  std::string mono_csv = "instance_id,n_splits,violations\n";
  std::string witness_csv = "instance_id,i,j,direction,value_i,value_j\n";

  CertifySummary summary;
  summary.instances = config.instances;

  for (std::size_t idx = 0; idx < config.instances; ++idx) {
    std::string id = "inst" + std::to_string(idx);
    Rng inst_rng = rng.split(idx);
    FiniteInstance inst = random_instance(inst_rng, config.ranges, id);

    auto hypotheses = inst.compose_encoders(inst.depth());
    std::size_t h_count = hypotheses.size();
    if (h_count * h_count > config.budget)
      throw BudgetError("certify: composed class too large for budget");

    double d_hdh = hdh_divergence(hypotheses, inst.src_points, inst.tgt_points,
                                  config.budget);
    double lam = lambda_h(hypotheses, inst);
    std::vector<double> rs(h_count), rt(h_count);
    for (std::size_t h = 0; h < h_count; ++h) {
      rs[h] = label_risk(hypotheses[h], inst.src_points, inst.src_labels);
      rt[h] = label_risk(hypotheses[h], inst.tgt_points, inst.tgt_labels);
    }

    // per-split class-level terms, then per-(f, g) checks
    std::size_t n_splits = inst.depth() - 1;
    std::vector<double> min_split_terms(h_count,
                                        std::numeric_limits<double>::infinity());
    struct SplitTerms {
      double d_fgdg;
      std::vector<double> d_latent, lam_fg;  // per encoder index
      std::size_t f_count, g_count;
    };
    std::vector<SplitTerms> per_split(n_splits);
    for (std::size_t i = 1; i <= n_splits; ++i) {
      auto predictors = inst.compose_predictors(i);
      auto encoders = inst.compose_encoders(i);
      SplitTerms& st = per_split[i - 1];
      st.f_count = predictors.size();
      st.g_count = encoders.size();
      st.d_fgdg = f_gdg_divergence(predictors, encoders, inst.src_points,
                                   inst.tgt_points, config.budget);
      for (const auto& g : encoders) {
        st.d_latent.push_back(latent_divergence(predictors, g, inst.src_points,
                                                inst.tgt_points, config.budget));
        st.lam_fg.push_back(lambda_fg_of_g(predictors, encoders, g, inst));
      }
      for (std::size_t h = 0; h < h_count; ++h) {
        std::size_t g_idx = h / st.f_count;
        double terms = st.d_latent[g_idx] + st.d_fgdg + st.lam_fg[g_idx];
        min_split_terms[h] = std::min(min_split_terms[h], terms);
      }
    }

    for (std::size_t i = 1; i <= n_splits; ++i) {
      const SplitTerms& st = per_split[i - 1];
      for (std::size_t h = 0; h < h_count; ++h) {
        std::size_t g_idx = h / st.f_count;
        std::size_t f_idx = h % st.f_count;
        double composed_rhs = rs[h] + d_hdh + lam;
        double main_rhs = rs[h] + st.d_latent[g_idx] + st.d_fgdg + st.lam_fg[g_idx];
        double cor_rhs = rs[h] + min_split_terms[h];
        bool v2 = composed_rhs < rt[h] - kViolationSlack;
        bool vm = main_rhs < rt[h] - kViolationSlack;
        bool vc = cor_rhs < rt[h] - kViolationSlack;
        summary.pairs_checked++;
        if (v2) summary.composed_violations++;
        if (vm) summary.main_violations++;
        if (vc && i == 1) summary.min_split_violations++;  // once per h
        bounds_csv += id + "," + std::to_string(i) + "," +
                      std::to_string(f_idx) + "," + std::to_string(g_idx) +
                      "," + fmt17(rs[h]) + "," + fmt17(rt[h]) + "," +
                      fmt17(composed_rhs) + "," + fmt17(main_rhs) + "," +
                      fmt17(cor_rhs) + "," + (v2 ? "1" : "0") + "," +
                      (vm ? "1" : "0") + "," + (vc ? "1" : "0") + "\n";
      }
    }

    MonotonicityResult mono;
    if (config.inject_corruption) {
      Rng corrupt_rng = inst_rng.split(0xc0ffee);
      mono = monotonicity_check_explicit(
          corrupted_split_classes(inst, corrupt_rng), inst, config.budget);
    } else {
      mono = monotonicity_check(inst, config.budget);
    }
    summary.monotonicity_violations += mono.violations;
    mono_csv += id + "," + std::to_string(n_splits) + "," +
                std::to_string(mono.violations) + "\n";
    for (const auto& w : mono.witnesses)
      witness_csv += id + "," + std::to_string(w.i) + "," +
                     std::to_string(w.j) + "," + w.direction + "," +
                     fmt17(w.value_i) + "," + fmt17(w.value_j) + "\n";
  }

  atomic_write(config.out_dir + "/bounds_summary.csv", bounds_csv);
  atomic_write(config.out_dir + "/monotonicity_summary.csv", mono_csv);
  atomic_write(config.out_dir + "/monotonicity_witnesses.csv", witness_csv);
  return summary;
}

}  // namespace dalab
