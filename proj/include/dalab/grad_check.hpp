#pragma once

#include <functional>
#include <string>

#include "dalab/adam.hpp"
#include "dalab/tensor.hpp"

namespace dalab {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;   // "name[index]" of the worst entry
  bool ok = true;            // max_rel_err < tolerance
};

// Scalar program under test: evaluates the loss at the given parameters
// and, when grads_out is non-null, also fills analytic gradients.
using LossFn = std::function<double(const ParamMap&, ParamMap* grads_out)>;

// Compares analytic gradients with central finite differences entry by
// entry. Relative error uses denominator max(|analytic|, |numeric|, 1).
GradCheckReport grad_check(const LossFn& fn, ParamMap params, double tolerance,
                           double fd_step = 1e-4);

}  // namespace dalab
