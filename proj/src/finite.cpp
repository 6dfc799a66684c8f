#include "dalab/finite.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dalab {

void FiniteInstance::validate() const {
  if (layers.empty()) throw std::runtime_error("instance has no layers");
  if (space_sizes.size() != layers.size() + 1)
    throw std::runtime_error("space_sizes must have depth+1 entries");
  for (std::size_t s : space_sizes)
    if (s == 0) throw std::runtime_error("empty space in instance");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (layers[k].empty())
      throw std::runtime_error("layer " + std::to_string(k + 1) +
                               " has no functions");
    for (const auto& f : layers[k]) {
      if (f.size() != space_sizes[k])
        throw std::runtime_error("layer " + std::to_string(k + 1) +
                                 " table has wrong domain size");
      for (int v : f)
        if (v < 0 || static_cast<std::size_t>(v) >= space_sizes[k + 1])
          throw std::runtime_error("layer " + std::to_string(k + 1) +
                                   " table maps outside its codomain");
    }
  }
  auto check_points = [&](const std::vector<int>& pts,
                          const std::vector<int>& labels, const char* which) {
    if (pts.empty())
      throw std::runtime_error(std::string(which) + " sample is empty");
    if (pts.size() != labels.size())
      throw std::runtime_error(std::string(which) + " labels/points mismatch");
    for (int p : pts)
      if (p < 0 || static_cast<std::size_t>(p) >= space_sizes.front())
        throw std::runtime_error(std::string(which) +
                                 " point outside the input space");
    for (int y : labels)
      if (y < 0 || static_cast<std::size_t>(y) >= space_sizes.back())
        throw std::runtime_error(std::string(which) + " label out of range");
  };
  check_points(src_points, src_labels, "source");
  check_points(tgt_points, tgt_labels, "target");
}

std::size_t FiniteInstance::encoder_class_size(std::size_t split) const {
  std::size_t n = 1;
  for (std::size_t k = 0; k < split; ++k) n *= layers[k].size();
  return n;
}

std::size_t FiniteInstance::predictor_class_size(std::size_t split) const {
  std::size_t n = 1;
  for (std::size_t k = split; k < layers.size(); ++k) n *= layers[k].size();
  return n;
}

namespace {

FiniteFunction compose(const FiniteFunction& outer, const FiniteFunction& inner) {
  FiniteFunction out(inner.size());
  for (std::size_t x = 0; x < inner.size(); ++x)
    out[x] = outer[static_cast<std::size_t>(inner[x])];
  return out;
}

FiniteFunction identity(std::size_t n) {
  FiniteFunction f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<int>(i);
  return f;
}

}  // namespace

FunctionSet FiniteInstance::compose_encoders(std::size_t split) const {
  if (split < 1 || split > depth())
    throw std::runtime_error("encoder split out of range");
  FunctionSet acc = {identity(space_sizes[0])};
  for (std::size_t k = 0; k < split; ++k) {
    FunctionSet next;
    next.reserve(acc.size() * layers[k].size());
    for (const auto& g : acc)
      for (const auto& q : layers[k]) next.push_back(compose(q, g));
    acc = std::move(next);
  }
  return acc;
}

FunctionSet FiniteInstance::compose_predictors(std::size_t split) const {
  if (split >= depth())
    throw std::runtime_error("predictor split out of range");
  FunctionSet acc = {identity(space_sizes[split])};
  for (std::size_t k = split; k < depth(); ++k) {
    FunctionSet next;
    next.reserve(acc.size() * layers[k].size());
    for (const auto& f : acc)
      for (const auto& q : layers[k]) next.push_back(compose(q, f));
    acc = std::move(next);
  }
  return acc;
}

std::string FiniteInstance::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["id"] = id;
  j["space_sizes"] = space_sizes;
  j["layers"] = layers;
  j["samples"]["source"]["points"] = src_points;
  j["samples"]["source"]["labels"] = src_labels;
  j["samples"]["target"]["points"] = tgt_points;
  j["samples"]["target"]["labels"] = tgt_labels;
  return j.dump(2);
}

FiniteInstance FiniteInstance::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("version", 0) != 1)
    throw std::runtime_error("unsupported finite-instance version");
  FiniteInstance inst;
  inst.id = j.value("id", "");
  inst.space_sizes = j.at("space_sizes").get<std::vector<std::size_t>>();
  inst.layers = j.at("layers").get<std::vector<FunctionSet>>();
  inst.src_points = j.at("samples").at("source").at("points").get<std::vector<int>>();
  inst.src_labels = j.at("samples").at("source").at("labels").get<std::vector<int>>();
  inst.tgt_points = j.at("samples").at("target").at("points").get<std::vector<int>>();
  inst.tgt_labels = j.at("samples").at("target").at("labels").get<std::vector<int>>();
  inst.validate();
  return inst;
}

void FiniteInstance::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json() << "\n";
}

FiniteInstance FiniteInstance::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

FiniteInstance random_instance(Rng& rng, const InstanceRanges& ranges,
                               const std::string& id) {
  if (ranges.max_depth < 2) throw std::runtime_error("max_depth must be >= 2");
  FiniteInstance inst;
  inst.id = id;
  std::size_t depth = 2 + rng.below(ranges.max_depth - 1);
  inst.space_sizes.resize(depth + 1);
  for (std::size_t k = 0; k <= depth; ++k)
    inst.space_sizes[k] = 2 + rng.below(ranges.max_space - 1);
  inst.space_sizes.back() = ranges.num_classes;

  inst.layers.resize(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    std::size_t count = 1 + rng.below(ranges.max_funcs_per_layer);
    for (std::size_t c = 0; c < count; ++c) {
      FiniteFunction f(inst.space_sizes[k]);
      for (auto& v : f)
        v = static_cast<int>(rng.below(inst.space_sizes[k + 1]));
      inst.layers[k].push_back(std::move(f));
    }
  }

  auto sample_points = [&](std::vector<int>& pts, std::vector<int>& labels) {
    std::size_t n = 2 + rng.below(ranges.max_points - 1);
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(static_cast<int>(rng.below(inst.space_sizes.front())));
      labels.push_back(static_cast<int>(rng.below(ranges.num_classes)));
    }
  };
  sample_points(inst.src_points, inst.src_labels);
  sample_points(inst.tgt_points, inst.tgt_labels);
  inst.validate();
  return inst;
}

double pair_risk(const FiniteFunction& h, const FiniteFunction& h2,
                 const std::vector<int>& points) {
  std::size_t diff = 0;
  for (int x : points)
    if (h[static_cast<std::size_t>(x)] != h2[static_cast<std::size_t>(x)]) ++diff;
  return static_cast<double>(diff) / static_cast<double>(points.size());
}

double label_risk(const FiniteFunction& h, const std::vector<int>& points,
                  const std::vector<int>& labels) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (h[static_cast<std::size_t>(points[i])] != labels[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(points.size());
}

}  // namespace dalab
