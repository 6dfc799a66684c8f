#pragma once

// Naive reference implementations kept deliberately dumb: triple loops over
// explicit tables, no pruning, no restriction-to-samples precomputation.
// The optimized library paths must agree with these bit-identically.

#include <cmath>
#include <vector>

#include "dalab/finite.hpp"

namespace oracle {

inline double pair_risk(const dalab::FiniteFunction& a,
                        const dalab::FiniteFunction& b,
                        const std::vector<int>& points) {
  std::size_t miss = 0;
  for (int p : points)
    if (a[static_cast<std::size_t>(p)] != b[static_cast<std::size_t>(p)])
      ++miss;
  return static_cast<double>(miss) / static_cast<double>(points.size());
}

inline double naive_hdh(const dalab::FunctionSet& H, const std::vector<int>& S,
                        const std::vector<int>& T) {
  double best = 0.0;
  for (const auto& h : H)
    for (const auto& h2 : H)
      best = std::max(best,
                      std::abs(pair_risk(h, h2, S) - pair_risk(h, h2, T)));
  return best;
}

inline double naive_latent(const dalab::FunctionSet& F,
                           const dalab::FiniteFunction& g,
                           const std::vector<int>& S,
                           const std::vector<int>& T) {
  std::vector<int> zs, zt;
  for (int p : S) zs.push_back(g[static_cast<std::size_t>(p)]);
  for (int p : T) zt.push_back(g[static_cast<std::size_t>(p)]);
  return naive_hdh(F, zs, zt);
}

inline double naive_fgdg(const dalab::FunctionSet& F,
                         const dalab::FunctionSet& G,
                         const std::vector<int>& S,
                         const std::vector<int>& T) {
  double best = 0.0;
  for (const auto& f : F)
    for (const auto& g : G)
      for (const auto& g2 : G) {
        dalab::FiniteFunction fg(g.size()), fg2(g.size());
        for (std::size_t x = 0; x < g.size(); ++x) {
          fg[x] = f[static_cast<std::size_t>(g[x])];
          fg2[x] = f[static_cast<std::size_t>(g2[x])];
        }
        best = std::max(
            best, std::abs(pair_risk(fg, fg2, S) - pair_risk(fg, fg2, T)));
      }
  return best;
}

}  // namespace oracle
