#include "dalab/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace dalab {

GradCheckReport grad_check(const LossFn& fn, ParamMap params, double tolerance,
                           double fd_step) {
  ParamMap analytic;
  fn(params, &analytic);

  GradCheckReport rep;
  for (auto& [name, p] : params) {
    const Tensor& g = analytic.at(name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      double saved = p[i];
      p[i] = saved + fd_step;
      double up = fn(params, nullptr);
      p[i] = saved - fd_step;
      double down = fn(params, nullptr);
      p[i] = saved;
      double numeric = (up - down) / (2.0 * fd_step);
      double denom = std::max({std::abs(g[i]), std::abs(numeric), 1.0});
      double rel = std::abs(g[i] - numeric) / denom;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_param = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  rep.ok = rep.max_rel_err < tolerance;
  return rep;
}

}  // namespace dalab
