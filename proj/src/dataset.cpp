#include "dalab/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace dalab {

int DomainDataset::num_classes() const {
  int k = 0;
  for (int y : labels) k = std::max(k, y + 1);
  return k;
}

double DomainDataset::label_frequency(int label) const {
  if (labels.empty()) return 0.0;
  std::size_t c = 0;
  for (int y : labels)
    if (y == label) ++c;
  return static_cast<double>(c) / static_cast<double>(labels.size());
}

GeneratorKind generator_kind_from_string(const std::string& s) {
  if (s == "figure1_toy") return GeneratorKind::figure1_toy;
  if (s == "moons_shift") return GeneratorKind::moons_shift;
  if (s == "gaussian_shift") return GeneratorKind::gaussian_shift;
  throw std::runtime_error("unknown generator kind: " + s);
}

namespace {

DomainDataset make_dataset(std::size_t n, std::size_t d, DomainTag tag,
                           std::uint64_t seed) {
  DomainDataset ds;
  ds.features = Tensor({n, d});
  ds.labels.resize(n);
  ds.domain = tag;
  ds.seed = seed;
  return ds;
}

void check_toy(double epsilon, std::size_t n) {
  if (epsilon < 0.0 || epsilon >= 0.5)
    throw std::runtime_error("epsilon must be in [0, 0.5)");
  if (n == 0) throw std::runtime_error("n_per_domain must be positive");
}

}  // namespace

std::pair<DomainDataset, DomainDataset> generate_figure1_toy(
    const ToyShiftConfig& cfg, std::uint64_t seed) {
  check_toy(cfg.epsilon, cfg.n_per_domain);
  if (cfg.cluster_separation <= 0.0)
    throw std::runtime_error("cluster_separation must be positive");
  if (cfg.noise_sigma < 0.0)
    throw std::runtime_error("noise_sigma must be nonnegative");

  Rng rng(seed);
  double s = cfg.cluster_separation;
  auto src = make_dataset(cfg.n_per_domain, 2, DomainTag::source, seed);
  auto tgt = make_dataset(cfg.n_per_domain, 2, DomainTag::target, seed);

  // label 0 sits at x = -s, label 1 at x = +s in both domains; domains are
  // separated vertically so their supports are disjoint
  for (std::size_t i = 0; i < cfg.n_per_domain; ++i) {
    int ys = rng.bernoulli(0.5 + cfg.epsilon) ? 1 : 0;
    src.labels[i] = ys;
    src.features.at(i, 0) = (ys ? s : -s) + rng.normal(0.0, cfg.noise_sigma);
    src.features.at(i, 1) = 1.0 + rng.normal(0.0, cfg.noise_sigma);

    int yt = rng.bernoulli(0.5 - cfg.epsilon) ? 1 : 0;
    tgt.labels[i] = yt;
    tgt.features.at(i, 0) = (yt ? s : -s) + rng.normal(0.0, cfg.noise_sigma);
    tgt.features.at(i, 1) = -1.0 + rng.normal(0.0, cfg.noise_sigma);
  }
  return {std::move(src), std::move(tgt)};
}

std::pair<DomainDataset, DomainDataset> generate_moons_shift(
    const MoonsShiftConfig& cfg, std::uint64_t seed) {
  check_toy(std::abs(cfg.epsilon), cfg.n_per_domain);
  Rng rng(seed);
  auto src = make_dataset(cfg.n_per_domain, 2, DomainTag::source, seed);
  auto tgt = make_dataset(cfg.n_per_domain, 2, DomainTag::target, seed);

  double theta = cfg.rotation_deg * std::numbers::pi / 180.0;
  double ct = std::cos(theta), st = std::sin(theta);
  const double cx = 0.5, cy = 0.25;  // midpoint of the two moons

  auto sample_moon = [&](int label, double& x, double& y) {
    double t = rng.uniform(0.0, std::numbers::pi);
    if (label == 0) {
      x = std::cos(t);
      y = std::sin(t);
    } else {
      x = 1.0 - std::cos(t);
      y = 0.5 - std::sin(t);
    }
    x += rng.normal(0.0, cfg.noise_sigma);
    y += rng.normal(0.0, cfg.noise_sigma);
  };

  for (std::size_t i = 0; i < cfg.n_per_domain; ++i) {
    int ys = rng.bernoulli(0.5 + cfg.epsilon) ? 1 : 0;
    src.labels[i] = ys;
    sample_moon(ys, src.features.at(i, 0), src.features.at(i, 1));

    int yt = rng.bernoulli(0.5 - cfg.epsilon) ? 1 : 0;
    tgt.labels[i] = yt;
    double x, y;
    sample_moon(yt, x, y);
    tgt.features.at(i, 0) = cx + ct * (x - cx) - st * (y - cy);
    tgt.features.at(i, 1) = cy + st * (x - cx) + ct * (y - cy);
  }
  return {std::move(src), std::move(tgt)};
}

std::pair<DomainDataset, DomainDataset> generate_gaussian_shift(
    const GaussianShiftConfig& cfg, std::uint64_t seed) {
  check_toy(std::abs(cfg.epsilon), cfg.n_per_domain);
  if (cfg.dim == 0) throw std::runtime_error("dim must be positive");
  Rng rng(seed);
  auto src = make_dataset(cfg.n_per_domain, cfg.dim, DomainTag::source, seed);
  auto tgt = make_dataset(cfg.n_per_domain, cfg.dim, DomainTag::target, seed);

  std::size_t shift_axis = cfg.dim > 1 ? 1 : 0;
  double half = cfg.cluster_separation / 2.0;

  auto sample = [&](DomainDataset& ds, std::size_t i, int label, bool shifted) {
    for (std::size_t j = 0; j < cfg.dim; ++j) {
      double mean = (j == 0) ? (label ? half : -half) : 0.0;
      if (shifted && j == shift_axis) mean += cfg.shift;
      ds.features.at(i, j) = rng.normal(mean, cfg.noise_sigma);
    }
  };

  for (std::size_t i = 0; i < cfg.n_per_domain; ++i) {
    int ys = rng.bernoulli(0.5 + cfg.epsilon) ? 1 : 0;
    src.labels[i] = ys;
    sample(src, i, ys, false);
    int yt = rng.bernoulli(0.5 - cfg.epsilon) ? 1 : 0;
    tgt.labels[i] = yt;
    sample(tgt, i, yt, true);
  }
  return {std::move(src), std::move(tgt)};
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw ParseError("line " + std::to_string(line_no) +
                     ": non-numeric cell '" + cell + "'");
  return v;
}

}  // namespace

DomainDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw ParseError(path + ": empty file");
  auto header = split_line(line);
  if (header.empty() || header[0] != "label")
    throw ParseError(path + ": header must start with 'label'");
  std::size_t d = header.size() - 1;
  if (d == 0) throw ParseError(path + ": header names no features");

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != d + 1)
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(d + 1) + " cells, got " +
                       std::to_string(cells.size()));
    double lab = parse_double(cells[0], line_no);
    if (lab < 0.0 || lab != std::floor(lab))
      throw ParseError("line " + std::to_string(line_no) +
                       ": label must be a non-negative integer");
    labels.push_back(static_cast<int>(lab));
    for (std::size_t j = 1; j < cells.size(); ++j)
      values.push_back(parse_double(cells[j], line_no));
  }
  if (labels.empty()) throw ParseError(path + ": no data rows");

  DomainDataset ds;
  ds.features = Tensor({labels.size(), d}, std::move(values));
  ds.labels = std::move(labels);
  return ds;
}

void save_csv(const DomainDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << "label";
  for (std::size_t j = 0; j < ds.dim(); ++j) out << ",f" << j;
  out << "\n";
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.labels[i];
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features.at(i, j));
      out << ',' << buf;
    }
    out << "\n";
  }
}

std::pair<DomainDataset, DomainDataset> train_val_split(
    const DomainDataset& ds, double val_fraction, std::uint64_t seed) {
  if (val_fraction <= 0.0 || val_fraction >= 1.0)
    throw std::runtime_error("val_fraction must be in (0, 1)");
  std::size_t n = ds.size();
  auto n_val = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * val_fraction));
  if (n_val >= n)
    throw std::runtime_error("val_fraction leaves no training rows");

  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);

  auto take = [&](std::size_t begin, std::size_t end) {
    DomainDataset out;
    out.features = Tensor({end - begin, ds.dim()});
    out.labels.resize(end - begin);
    out.domain = ds.domain;
    out.seed = seed;
    for (std::size_t i = begin; i < end; ++i) {
      std::size_t src_row = idx[i];
      for (std::size_t j = 0; j < ds.dim(); ++j)
        out.features.at(i - begin, j) = ds.features.at(src_row, j);
      out.labels[i - begin] = ds.labels[src_row];
    }
    return out;
  };

  return {take(n_val, n), take(0, n_val)};
}

double min_cross_distance(const DomainDataset& a, const DomainDataset& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < a.dim(); ++k) {
        double diff = a.features.at(i, k) - b.features.at(j, k);
        d2 += diff * diff;
      }
      best = std::min(best, d2);
    }
  return std::sqrt(best);
}

}  // namespace dalab
