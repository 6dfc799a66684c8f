#include "dalab/tape.hpp"

#include <algorithm>
#include <cmath>

namespace dalab {

namespace {

// c (n, m) += a (n, k) @ b (k, m)
void matmul_acc(const double* a, const double* b, double* c, std::size_t n,
                std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      double aip = ai[p];
      const double* bp = b + p * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += aip * bp[j];
    }
  }
}

// c (k, m) += a^T (n, k) @ b (n, m)
void matmul_at_b_acc(const double* a, const double* b, double* c,
                     std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * k;
    const double* bi = b + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      double aip = ai[p];
      double* cp = c + p * m;
      for (std::size_t j = 0; j < m; ++j) cp[j] += aip * bi[j];
    }
  }
}

// c (n, k) += a (n, m) @ b^T (k, m)
void matmul_a_bt_acc(const double* a, const double* b, double* c,
                     std::size_t n, std::size_t m, std::size_t k) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * m;
    double* ci = c + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double* bp = b + p * m;
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += ai[j] * bp[j];
      ci[p] += acc;
    }
  }
}

}  // namespace

int Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  int id = static_cast<int>(nodes_.size()) - 1;
  check_finite(id);
  return id;
}

void Tape::check_finite(int id) const {
  if (!nodes_[id].value.all_finite())
    fail(id, "non-finite value produced");
}

void Tape::fail(int id, const std::string& what) const {
  throw NumericError("node " + std::to_string(id) + " (" + nodes_[id].name +
                     "): " + what);
}

int Tape::leaf(Tensor value, const std::string& name) {
  Node n;
  n.name = name;
  n.grad = Tensor::zeros_like(value);
  n.value = std::move(value);
  return push(std::move(n));
}

int Tape::affine(int x, int w, int b) {
  const Tensor& xv = nodes_[x].value;
  const Tensor& wv = nodes_[w].value;
  const Tensor& bv = nodes_[b].value;
  if (xv.cols() != wv.rows())
    throw ShapeError("affine: input width " + std::to_string(xv.cols()) +
                     " does not match weight rows " + std::to_string(wv.rows()));
  if (bv.size() != wv.cols())
    throw ShapeError("affine: bias length " + std::to_string(bv.size()) +
                     " does not match weight cols " + std::to_string(wv.cols()));
  std::size_t n = xv.rows(), in = xv.cols(), out = wv.cols();
  Tensor y({n, out});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < out; ++j) y.at(i, j) = bv[j];
  matmul_acc(xv.data(), wv.data(), y.data(), n, in, out);

  Node node;
  node.name = "affine";
  node.grad = Tensor::zeros_like(y);
  node.value = std::move(y);
  node.backward = [x, w, b, n, in, out](Tape& t, int self) {
    const Tensor& gy = t.nodes_[self].grad;
    const Tensor& xv2 = t.nodes_[x].value;
    const Tensor& wv2 = t.nodes_[w].value;
    matmul_a_bt_acc(gy.data(), wv2.data(), t.nodes_[x].grad.data(), n, out, in);
    matmul_at_b_acc(xv2.data(), gy.data(), t.nodes_[w].grad.data(), n, in, out);
    Tensor& gb = t.nodes_[b].grad;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < out; ++j) gb[j] += gy.at(i, j);
  };
  return push(std::move(node));
}

int Tape::relu(int x) {
  const Tensor& xv = nodes_[x].value;
  Tensor y = xv;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] < 0.0) y[i] = 0.0;

  Node node;
  node.name = "relu";
  node.grad = Tensor::zeros_like(y);
  node.value = std::move(y);
  node.backward = [x](Tape& t, int self) {
    const Tensor& gy = t.nodes_[self].grad;
    const Tensor& xv2 = t.nodes_[x].value;
    Tensor& gx = t.nodes_[x].grad;
    for (std::size_t i = 0; i < gy.size(); ++i)
      if (xv2[i] > 0.0) gx[i] += gy[i];
  };
  return push(std::move(node));
}

int Tape::grad_reverse(int x, double coeff) {
  Node node;
  node.name = "grad_reverse";
  node.value = nodes_[x].value;
  node.grad = Tensor::zeros_like(node.value);
  node.backward = [x, coeff](Tape& t, int self) {
    const Tensor& gy = t.nodes_[self].grad;
    Tensor& gx = t.nodes_[x].grad;
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] -= coeff * gy[i];
  };
  return push(std::move(node));
}

int Tape::softmax_cross_entropy(int logits, std::vector<int> labels) {
  const Tensor& z = nodes_[logits].value;
  std::size_t n = z.rows(), k = z.cols();
  if (labels.size() != n)
    throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(n) + " rows");
  Tensor probs({n, k});
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= k)
      throw ShapeError("softmax_cross_entropy: label " + std::to_string(y) +
                       " out of range for " + std::to_string(k) + " classes");
    double mx = z.at(i, 0);
    for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, z.at(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double e = std::exp(z.at(i, j) - mx);
      probs.at(i, j) = e;
      sum += e;
    }
    for (std::size_t j = 0; j < k; ++j) probs.at(i, j) /= sum;
    loss -= std::log(probs.at(i, static_cast<std::size_t>(y)));
  }
  loss /= static_cast<double>(n);

  Node node;
  node.name = "softmax_cross_entropy";
  node.value = Tensor::scalar(loss);
  node.grad = Tensor({1});
  node.backward = [logits, labels = std::move(labels), probs = std::move(probs),
                   n, k](Tape& t, int self) {
    double g = t.nodes_[self].grad[0] / static_cast<double>(n);
    Tensor& gz = t.nodes_[logits].grad;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        double p = probs.at(i, j);
        double target = (static_cast<std::size_t>(labels[i]) == j) ? 1.0 : 0.0;
        gz.at(i, j) += g * (p - target);
      }
  };
  return push(std::move(node));
}

int Tape::sigmoid_cross_entropy(int logits, std::vector<double> targets) {
  const Tensor& z = nodes_[logits].value;
  std::size_t n = z.size();
  if (targets.size() != n)
    throw ShapeError("sigmoid_cross_entropy: " + std::to_string(targets.size()) +
                     " targets for " + std::to_string(n) + " logits");
  // stable form: max(z,0) - z*y + log(1 + exp(-|z|))
  double loss = 0.0;
  std::vector<double> sig(n);
  for (std::size_t i = 0; i < n; ++i) {
    double zi = z[i];
    sig[i] = 1.0 / (1.0 + std::exp(-zi));
    loss += std::max(zi, 0.0) - zi * targets[i] + std::log1p(std::exp(-std::abs(zi)));
  }
  loss /= static_cast<double>(n);

  Node node;
  node.name = "sigmoid_cross_entropy";
  node.value = Tensor::scalar(loss);
  node.grad = Tensor({1});
  node.backward = [logits, targets = std::move(targets), sig = std::move(sig),
                   n](Tape& t, int self) {
    double g = t.nodes_[self].grad[0] / static_cast<double>(n);
    Tensor& gz = t.nodes_[logits].grad;
    for (std::size_t i = 0; i < n; ++i) gz[i] += g * (sig[i] - targets[i]);
  };
  return push(std::move(node));
}

int Tape::mean(int x) {
  const Tensor& xv = nodes_[x].value;
  std::size_t n = xv.size();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m += xv[i];
  m /= static_cast<double>(n);

  Node node;
  node.name = "mean";
  node.value = Tensor::scalar(m);
  node.grad = Tensor({1});
  node.backward = [x, n](Tape& t, int self) {
    double g = t.nodes_[self].grad[0] / static_cast<double>(n);
    Tensor& gx = t.nodes_[x].grad;
    for (std::size_t i = 0; i < n; ++i) gx[i] += g;
  };
  return push(std::move(node));
}

int Tape::add(int a, int b) {
  const Tensor& av = nodes_[a].value;
  const Tensor& bv = nodes_[b].value;
  if (!av.same_shape(bv))
    throw ShapeError("add: shape mismatch " + shape_str(av) + " vs " +
                     shape_str(bv));
  Tensor y = av;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];

  Node node;
  node.name = "add";
  node.grad = Tensor::zeros_like(y);
  node.value = std::move(y);
  node.backward = [a, b](Tape& t, int self) {
    const Tensor& gy = t.nodes_[self].grad;
    Tensor& ga = t.nodes_[a].grad;
    Tensor& gb = t.nodes_[b].grad;
    for (std::size_t i = 0; i < gy.size(); ++i) {
      ga[i] += gy[i];
      gb[i] += gy[i];
    }
  };
  return push(std::move(node));
}

int Tape::scale(int x, double c) {
  Tensor y = nodes_[x].value;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= c;

  Node node;
  node.name = "scale";
  node.grad = Tensor::zeros_like(y);
  node.value = std::move(y);
  node.backward = [x, c](Tape& t, int self) {
    const Tensor& gy = t.nodes_[self].grad;
    Tensor& gx = t.nodes_[x].grad;
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += c * gy[i];
  };
  return push(std::move(node));
}

int Tape::unary(int x, const std::string& name,
                const std::function<double(double)>& f,
                const std::function<double(double)>& df) {
  const Tensor& xv = nodes_[x].value;
  Tensor y = xv;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = f(xv[i]);

  Node node;
  node.name = name;
  node.grad = Tensor::zeros_like(y);
  node.value = std::move(y);
  node.backward = [x, df](Tape& t, int self) {
    const Tensor& gy = t.nodes_[self].grad;
    const Tensor& xv2 = t.nodes_[x].value;
    Tensor& gx = t.nodes_[x].grad;
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * df(xv2[i]);
  };
  return push(std::move(node));
}

double Tape::scalar_value(int id) const {
  const Tensor& v = nodes_[id].value;
  if (v.size() != 1)
    throw ShapeError("scalar_value: node " + std::to_string(id) +
                     " has shape " + shape_str(v));
  return v[0];
}

void Tape::backward(int loss) {
  if (nodes_[loss].value.size() != 1)
    fail(loss, "backward requires a scalar loss");
  for (auto& n : nodes_) n.grad.fill(0.0);
  nodes_[loss].grad[0] = 1.0;
  for (int i = loss; i >= 0; --i)
    if (nodes_[i].backward) nodes_[i].backward(*this, i);
  for (int i = 0; i <= loss; ++i)
    if (!nodes_[i].grad.all_finite()) fail(i, "non-finite gradient");
}

}  // namespace dalab
