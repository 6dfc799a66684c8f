#include "dalab/divergence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "dalab/net.hpp"

namespace dalab {

DivergenceFlavor divergence_flavor_from_string(const std::string& s) {
  if (s == "hdh") return DivergenceFlavor::hdh;
  if (s == "f_latent") return DivergenceFlavor::f_latent;
  if (s == "f_gdg") return DivergenceFlavor::f_gdg;
  if (s == "fg_dfg") return DivergenceFlavor::fg_dfg;
  throw std::runtime_error("unknown divergence flavor: " + s);
}

std::string to_string(DivergenceFlavor f) {
  switch (f) {
    case DivergenceFlavor::hdh: return "hdh";
    case DivergenceFlavor::f_latent: return "f_latent";
    case DivergenceFlavor::f_gdg: return "f_gdg";
    case DivergenceFlavor::fg_dfg: return "fg_dfg";
  }
  return "?";
}

namespace {

void check_budget(std::size_t tuples, std::size_t budget, const char* what) {
  if (tuples > budget)
    throw BudgetError(std::string(what) + ": " + std::to_string(tuples) +
                      " tuples exceed the enumeration budget of " +
                      std::to_string(budget));
}

// outputs of every function restricted to a point multiset
std::vector<std::vector<int>> restrict_to(const FunctionSet& fns,
                                          const std::vector<int>& points) {
  std::vector<std::vector<int>> out(fns.size());
  for (std::size_t i = 0; i < fns.size(); ++i) {
    out[i].resize(points.size());
    for (std::size_t p = 0; p < points.size(); ++p)
      out[i][p] = fns[i][static_cast<std::size_t>(points[p])];
  }
  return out;
}

double risk_gap(const std::vector<int>& hs, const std::vector<int>& hs2,
                const std::vector<int>& ht, const std::vector<int>& ht2) {
  std::size_t ds = 0, dt = 0;
  for (std::size_t p = 0; p < hs.size(); ++p)
    if (hs[p] != hs2[p]) ++ds;
  for (std::size_t p = 0; p < ht.size(); ++p)
    if (ht[p] != ht2[p]) ++dt;
  double rs = static_cast<double>(ds) / static_cast<double>(hs.size());
  double rt = static_cast<double>(dt) / static_cast<double>(ht.size());
  return std::abs(rs - rt);
}

}  // namespace

double hdh_divergence(const FunctionSet& hypotheses, const std::vector<int>& S,
                      const std::vector<int>& T, std::size_t budget) {
  if (hypotheses.empty()) throw std::runtime_error("empty hypothesis class");
  check_budget(hypotheses.size() * hypotheses.size(), budget, "hdh");
  auto on_s = restrict_to(hypotheses, S);
  auto on_t = restrict_to(hypotheses, T);
  double best = 0.0;
  for (std::size_t a = 0; a < hypotheses.size(); ++a)
    for (std::size_t b = 0; b < hypotheses.size(); ++b)
      best = std::max(best, risk_gap(on_s[a], on_s[b], on_t[a], on_t[b]));
  return best;
}

double latent_divergence(const FunctionSet& predictors,
                         const FiniteFunction& encoder,
                         const std::vector<int>& S, const std::vector<int>& T,
                         std::size_t budget) {
  std::vector<int> zs(S.size()), zt(T.size());
  for (std::size_t i = 0; i < S.size(); ++i)
    zs[i] = encoder[static_cast<std::size_t>(S[i])];
  for (std::size_t i = 0; i < T.size(); ++i)
    zt[i] = encoder[static_cast<std::size_t>(T[i])];
  return hdh_divergence(predictors, zs, zt, budget);
}

double f_gdg_divergence(const FunctionSet& predictors,
                        const FunctionSet& encoders, const std::vector<int>& S,
                        const std::vector<int>& T, std::size_t budget) {
  if (predictors.empty() || encoders.empty())
    throw std::runtime_error("empty class in f_gdg divergence");
  check_budget(predictors.size() * encoders.size() * encoders.size(), budget,
               "f_gdg");
  auto enc_s = restrict_to(encoders, S);
  auto enc_t = restrict_to(encoders, T);
  double best = 0.0;
  std::vector<int> fs(S.size()), fs2(S.size()), ft(T.size()), ft2(T.size());
  for (const auto& f : predictors)
    for (std::size_t a = 0; a < encoders.size(); ++a)
      for (std::size_t b = 0; b < encoders.size(); ++b) {
        for (std::size_t p = 0; p < S.size(); ++p) {
          fs[p] = f[static_cast<std::size_t>(enc_s[a][p])];
          fs2[p] = f[static_cast<std::size_t>(enc_s[b][p])];
        }
        for (std::size_t p = 0; p < T.size(); ++p) {
          ft[p] = f[static_cast<std::size_t>(enc_t[a][p])];
          ft2[p] = f[static_cast<std::size_t>(enc_t[b][p])];
        }
        best = std::max(best, risk_gap(fs, fs2, ft, ft2));
      }
  return best;
}

DivergenceEstimate exact_divergence(DivergenceFlavor flavor,
                                    const FiniteInstance& instance,
                                    std::size_t split,
                                    std::size_t fixed_encoder_index,
                                    std::size_t budget) {
  instance.validate();
  auto t0 = std::chrono::steady_clock::now();

  DivergenceEstimate est;
  est.flavor = to_string(flavor);
  est.n_src = instance.src_points.size();
  est.n_tgt = instance.tgt_points.size();
  est.class_size_f = instance.predictor_class_size(split);
  est.class_size_g = instance.encoder_class_size(split);

  switch (flavor) {
    case DivergenceFlavor::hdh:
    case DivergenceFlavor::fg_dfg: {
      // the composed class F_i o G_i is the full class H regardless of i
      std::size_t h = est.class_size_f * est.class_size_g;
      check_budget(h * h, budget, "hdh");
      auto hypotheses = instance.compose_encoders(instance.depth());
      est.value = hdh_divergence(hypotheses, instance.src_points,
                                 instance.tgt_points, budget);
      est.pairs_evaluated = h * h;
      break;
    }
    case DivergenceFlavor::f_latent: {
      auto encoders = instance.compose_encoders(split);
      if (fixed_encoder_index >= encoders.size())
        throw std::runtime_error("fixed encoder index out of range");
      auto predictors = instance.compose_predictors(split);
      est.value = latent_divergence(predictors, encoders[fixed_encoder_index],
                                    instance.src_points, instance.tgt_points,
                                    budget);
      est.pairs_evaluated = predictors.size() * predictors.size();
      break;
    }
    case DivergenceFlavor::f_gdg: {
      auto predictors = instance.compose_predictors(split);
      auto encoders = instance.compose_encoders(split);
      est.value = f_gdg_divergence(predictors, encoders, instance.src_points,
                                   instance.tgt_points, budget);
      est.pairs_evaluated =
          predictors.size() * encoders.size() * encoders.size();
      break;
    }
  }

  est.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return est;
}

ProxyEstimate proxy_divergence(const Tensor& src_activations,
                               const Tensor& tgt_activations,
                               const ProxyConfig& config, std::uint64_t seed) {
  if (src_activations.cols() != tgt_activations.cols())
    throw ShapeError("proxy_divergence: activation width mismatch");
  std::size_t ns = src_activations.rows(), nt = tgt_activations.rows();
  if (ns < 10 || nt < 10)
    throw std::runtime_error("proxy_divergence: need at least 10 samples per domain");

  Rng rng(seed);
  auto split_domain = [&](std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    rng.shuffle(idx);
    std::size_t n_hold = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(
               static_cast<double>(n) * config.holdout_fraction)));
    return std::pair{std::vector<std::size_t>(idx.begin() + n_hold, idx.end()),
                     std::vector<std::size_t>(idx.begin(), idx.begin() + n_hold)};
  };
  auto [src_train_idx, src_hold_idx] = split_domain(ns);
  auto [tgt_train_idx, tgt_hold_idx] = split_domain(nt);

  std::size_t d = src_activations.cols();
  auto gather = [&](const Tensor& m, const std::vector<std::size_t>& idx) {
    Tensor out({idx.size(), d});
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < d; ++j) out.at(i, j) = m.at(idx[i], j);
    return out;
  };
  Tensor xs = gather(src_activations, src_train_idx);
  Tensor xt = gather(tgt_activations, tgt_train_idx);

  std::vector<std::size_t> widths;
  widths.push_back(d);
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(2);
  LayeredNet disc = LayeredNet::mlp(widths, rng.next_u64());
  Adam opt(AdamConfig{config.lr, 0.9, 0.999, 1e-8});

  std::size_t batch = std::min({config.batch_size, xs.rows(), xt.rows()});
  std::size_t steps = std::max<std::size_t>(1, xs.rows() / batch);
  std::vector<std::size_t> is(xs.rows()), it(xt.rows());
  for (std::size_t i = 0; i < is.size(); ++i) is[i] = i;
  for (std::size_t i = 0; i < it.size(); ++i) it[i] = i;

  double last_loss = 0.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(is);
    rng.shuffle(it);
    for (std::size_t step = 0; step < steps; ++step) {
      Tensor bs({batch, d}), bt({batch, d});
      for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          bs.at(i, j) = xs.at(is[(step * batch + i) % is.size()], j);
          bt.at(i, j) = xt.at(it[(step * batch + i) % it.size()], j);
        }
      Tape t;
      auto pids = disc.leaf_params(t);
      int ls = disc.tape_forward(t, t.leaf(bs), pids, 0, disc.depth());
      int lt = disc.tape_forward(t, t.leaf(bt), pids, 0, disc.depth());
      int loss = t.scale(t.add(t.softmax_cross_entropy(ls, std::vector<int>(batch, 0)),
                               t.softmax_cross_entropy(lt, std::vector<int>(batch, 1))),
                         0.5);
      t.backward(loss);
      ParamMap grads;
      for (const auto& [name, id] : pids) grads.emplace(name, t.grad(id));
      opt.step(disc.params(), grads);
      last_loss = t.scalar_value(loss);
    }
  }

  Tensor hs = gather(src_activations, src_hold_idx);
  Tensor ht = gather(tgt_activations, tgt_hold_idx);
  auto ps = disc.predict(hs);
  auto pt = disc.predict(ht);
  std::size_t wrong = 0;
  for (int p : ps)
    if (p != 0) ++wrong;
  for (int p : pt)
    if (p != 1) ++wrong;
  double err = static_cast<double>(wrong) /
               static_cast<double>(ps.size() + pt.size());

  ProxyEstimate est;
  est.heldout_err = err;
  est.proxy_a = proxy_a_from_error(err);
  est.disc_loss = last_loss;
  est.n_src = ns;
  est.n_tgt = nt;
  return est;
}

}  // namespace dalab
