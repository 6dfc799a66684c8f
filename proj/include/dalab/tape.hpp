#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dalab/tensor.hpp"

namespace dalab {

// Reverse-mode tape over dense tensors. Nodes are appended in execution
// order; backward walks them in exact reverse order, so gradients are
// deterministic for a fixed program. A tape is built per step and thrown
// away (define-by-run).
class Tape {
 public:
  struct Node {
    std::string name;
    Tensor value;
    Tensor grad;
    std::function<void(Tape&, int)> backward;  // may be empty (leaf)
  };

  int leaf(Tensor value, const std::string& name = "leaf");

  // y = x @ w + b, x: (n, in), w: (in, out), b: (out)
  int affine(int x, int w, int b);

  int relu(int x);

  // forward identity, backward multiplies the gradient by -coeff
  int grad_reverse(int x, double coeff);

  // mean softmax cross-entropy against integer class labels; logits (n, k)
  int softmax_cross_entropy(int logits, std::vector<int> labels);

  // mean sigmoid binary cross-entropy; logits (n, 1), targets in {0, 1}
  int sigmoid_cross_entropy(int logits, std::vector<double> targets);

  int mean(int x);
  int add(int a, int b);
  int scale(int x, double c);

  // elementwise op with caller-supplied derivative; used by tests to
  // inject corrupted backward rules and by one-off activations
  int unary(int x, const std::string& name,
            const std::function<double(double)>& f,
            const std::function<double(double)>& df);

  void backward(int loss);

  const Tensor& value(int id) const { return nodes_[id].value; }
  double scalar_value(int id) const;
  const Tensor& grad(int id) const { return nodes_[id].grad; }
  std::size_t size() const { return nodes_.size(); }
  const std::string& name(int id) const { return nodes_[id].name; }

 private:
  int push(Node n);
  void check_finite(int id) const;
  [[noreturn]] void fail(int id, const std::string& what) const;

  std::vector<Node> nodes_;
};

}  // namespace dalab
