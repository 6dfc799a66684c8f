#include "dalab/net.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dalab {

std::string LayeredNet::weight_name(std::size_t layer) {
  return "L" + std::to_string(layer) + ".w";
}

std::string LayeredNet::bias_name(std::size_t layer) {
  return "L" + std::to_string(layer) + ".b";
}

LayeredNet::LayeredNet(std::vector<LayerSpec> specs, std::uint64_t init_seed,
                       double init_scale)
    : specs_(std::move(specs)) {
  if (!(init_scale > 0.0)) throw std::runtime_error("init_scale must be > 0");
  if (specs_.size() < 2)
    throw std::runtime_error("LayeredNet requires at least 2 layers");
  for (std::size_t k = 1; k < specs_.size(); ++k)
    if (specs_[k].in != specs_[k - 1].out)
      throw ShapeError("layer " + std::to_string(k) + " input width " +
                       std::to_string(specs_[k].in) +
                       " does not match previous output " +
                       std::to_string(specs_[k - 1].out));

  Rng rng(init_seed);
  for (std::size_t k = 0; k < specs_.size(); ++k) {
    const auto& s = specs_[k];
    Tensor w({s.in, s.out});
    double bound =
        init_scale * std::sqrt(6.0 / static_cast<double>(s.in + s.out));
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = rng.uniform(-bound, bound);
    params_.emplace(weight_name(k), std::move(w));
    params_.emplace(bias_name(k), Tensor({s.out}));
  }
}

LayeredNet LayeredNet::mlp(const std::vector<std::size_t>& widths,
                           std::uint64_t init_seed) {
  if (widths.size() < 3)
    throw std::runtime_error("mlp needs at least input, hidden, output widths");
  std::vector<LayerSpec> specs;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k)
    specs.push_back({widths[k], widths[k + 1], k + 2 < widths.size()});
  return LayeredNet(std::move(specs), init_seed);
}

Tensor LayeredNet::forward_range(const Tensor& x, std::size_t from,
                                 std::size_t to) const {
  if (from >= to || to > depth())
    throw std::runtime_error("forward_range: bad layer range");
  if (x.cols() != specs_[from].in)
    throw ShapeError("batch width " + std::to_string(x.cols()) +
                     " does not match layer input width " +
                     std::to_string(specs_[from].in));
  Tensor h = x;
  for (std::size_t k = from; k < to; ++k) {
    const Tensor& w = params_.at(weight_name(k));
    const Tensor& b = params_.at(bias_name(k));
    Tensor y({h.rows(), specs_[k].out});
    for (std::size_t i = 0; i < h.rows(); ++i)
      for (std::size_t j = 0; j < specs_[k].out; ++j) {
        double acc = b[j];
        for (std::size_t p = 0; p < specs_[k].in; ++p)
          acc += h.at(i, p) * w.at(p, j);
        y.at(i, j) = specs_[k].relu && acc < 0.0 ? 0.0 : acc;
      }
    h = std::move(y);
  }
  return h;
}

std::vector<Tensor> LayeredNet::forward_activations(const Tensor& x) const {
  std::vector<Tensor> acts;
  acts.reserve(depth());
  Tensor h = x;
  for (std::size_t k = 0; k < depth(); ++k) {
    h = forward_range(h, k, k + 1);
    acts.push_back(h);
  }
  return acts;
}

namespace {

Tensor softmax_rows(const Tensor& z) {
  Tensor p({z.rows(), z.cols()});
  for (std::size_t i = 0; i < z.rows(); ++i) {
    double mx = z.at(i, 0);
    for (std::size_t j = 1; j < z.cols(); ++j) mx = std::max(mx, z.at(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < z.cols(); ++j) {
      p.at(i, j) = std::exp(z.at(i, j) - mx);
      sum += p.at(i, j);
    }
    for (std::size_t j = 0; j < z.cols(); ++j) p.at(i, j) /= sum;
  }
  return p;
}

std::vector<int> argmax_rows(const Tensor& z) {
  std::vector<int> out(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    int best = 0;
    for (std::size_t j = 1; j < z.cols(); ++j)
      if (z.at(i, j) > z.at(i, static_cast<std::size_t>(best))) best = static_cast<int>(j);
    out[i] = best;
  }
  return out;
}

}  // namespace

Tensor LayeredNet::predict_proba(const Tensor& x) const {
  return softmax_rows(forward_range(x, 0, depth()));
}

std::vector<int> LayeredNet::predict(const Tensor& x) const {
  return argmax_rows(forward_range(x, 0, depth()));
}

int LayeredNet::tape_forward(Tape& t, int x,
                             const std::map<std::string, int>& pids,
                             std::size_t from, std::size_t to) const {
  if (from >= to || to > depth())
    throw std::runtime_error("tape_forward: bad layer range");
  int h = x;
  for (std::size_t k = from; k < to; ++k) {
    h = t.affine(h, pids.at(weight_name(k)), pids.at(bias_name(k)));
    if (specs_[k].relu) h = t.relu(h);
  }
  return h;
}

std::map<std::string, int> LayeredNet::leaf_params(Tape& t) const {
  std::map<std::string, int> pids;
  for (const auto& [name, tensor] : params_) pids[name] = t.leaf(tensor, name);
  return pids;
}

void LayeredNet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "dalab-net 1\n" << depth() << "\n";
  for (const auto& s : specs_)
    out << s.in << " " << s.out << " " << (s.relu ? 1 : 0) << "\n";
  char buf[64];
  for (const auto& [name, tensor] : params_) {
    out << name << " " << tensor.size();
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%a", tensor[i]);  // exact hex floats
      out << " " << buf;
    }
    out << "\n";
  }
}

LayeredNet LayeredNet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "dalab-net" || version != 1)
    throw std::runtime_error(path + ": not a dalab-net v1 checkpoint");
  std::size_t n = 0;
  in >> n;
  std::vector<LayerSpec> specs(n);
  for (auto& s : specs) {
    int relu = 0;
    in >> s.in >> s.out >> relu;
    s.relu = relu != 0;
  }
  LayeredNet net(std::move(specs), 0);
  for (auto& [name, tensor] : net.params_) {
    std::string got;
    std::size_t count = 0;
    in >> got >> count;
    if (got != name || count != tensor.size())
      throw std::runtime_error(path + ": parameter block mismatch at " + name);
    for (std::size_t i = 0; i < count; ++i) {
      std::string tok;
      in >> tok;
      tensor[i] = std::strtod(tok.c_str(), nullptr);
    }
  }
  if (!in) throw std::runtime_error(path + ": truncated checkpoint");
  return net;
}

SplitView::SplitView(const LayeredNet& n, std::size_t i)
    : net(&n), split_index(i) {
  if (i < 1 || i >= n.depth())
    throw std::runtime_error("split index must be in [1, N-1]");
}

Tensor SplitView::encode(const Tensor& x) const {
  return net->forward_range(x, 0, split_index);
}

Tensor SplitView::predict_proba_from_latent(const Tensor& z) const {
  return softmax_rows(net->forward_range(z, split_index, net->depth()));
}

Discriminator::Discriminator(std::size_t input_width, std::size_t attached,
                             std::uint64_t init_seed,
                             const std::vector<std::size_t>& hidden)
    : net([&] {
        std::vector<std::size_t> widths;
        widths.push_back(input_width);
        widths.insert(widths.end(), hidden.begin(), hidden.end());
        widths.push_back(2);
        return LayeredNet::mlp(widths, init_seed);
      }()),
      attached_layer(attached) {}

double zero_one_risk(const LayeredNet& net, const DomainDataset& ds) {
  if (ds.size() == 0) throw std::runtime_error("zero_one_risk: empty dataset");
  auto preds = net.predict(ds.features);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i] != ds.labels[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(preds.size());
}

double disagreement(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::runtime_error("disagreement: size mismatch or empty");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++diff;
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

double disagreement(const LayeredNet& a, const LayeredNet& b,
                    const DomainDataset& ds) {
  return disagreement(a.predict(ds.features), b.predict(ds.features));
}

}  // namespace dalab
