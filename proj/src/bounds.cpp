#include "dalab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace dalab {

namespace {

FiniteFunction composed(const FiniteFunction& f, const FiniteFunction& g) {
  FiniteFunction h(g.size());
  for (std::size_t x = 0; x < g.size(); ++x)
    h[x] = f[static_cast<std::size_t>(g[x])];
  return h;
}

double joint_label_risk(const FiniteFunction& h, const FiniteInstance& inst) {
  return label_risk(h, inst.src_points, inst.src_labels) +
         label_risk(h, inst.tgt_points, inst.tgt_labels);
}

}  // namespace

double lambda_h(const FunctionSet& hypotheses, const FiniteInstance& inst) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : hypotheses) best = std::min(best, joint_label_risk(h, inst));
  return best;
}

double lambda_f_of_g(const FunctionSet& predictors, const FiniteFunction& encoder,
                     const FiniteInstance& inst) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : predictors)
    best = std::min(best, joint_label_risk(composed(f, encoder), inst));
  return best;
}

double lambda_fg_of_g(const FunctionSet& predictors, const FunctionSet& encoders,
                      const FiniteFunction& encoder, const FiniteInstance& inst) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : predictors) {
    double anchored = 2.0 * label_risk(composed(f, encoder), inst.src_points,
                                       inst.src_labels);
    for (const auto& g2 : encoders) {
      FiniteFunction h = composed(f, g2);
      double v = anchored + label_risk(h, inst.src_points, inst.src_labels) +
                 label_risk(h, inst.tgt_points, inst.tgt_labels);
      best = std::min(best, v);
    }
  }
  return best;
}

double lambda_fg_joint(const FunctionSet& predictors, const FunctionSet& encoders,
                       const FiniteInstance& inst) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : predictors)
    for (const auto& g : encoders)
      best = std::min(best, joint_label_risk(composed(f, g), inst));
  return best;
}

double lambda_term(LambdaKind kind, const FiniteInstance& inst, std::size_t split,
                   std::size_t fixed_encoder_index, std::size_t budget) {
  inst.validate();
  std::size_t work = inst.predictor_class_size(split) *
                     inst.encoder_class_size(split);
  if (work > budget)
    throw BudgetError("lambda: class product " + std::to_string(work) +
                      " exceeds the enumeration budget");
  switch (kind) {
    case LambdaKind::lambda_h:
      return lambda_h(inst.compose_encoders(inst.depth()), inst);
    case LambdaKind::lambda_f_of_g: {
      auto encoders = inst.compose_encoders(split);
      if (fixed_encoder_index >= encoders.size())
        throw std::runtime_error("fixed encoder index out of range");
      return lambda_f_of_g(inst.compose_predictors(split),
                           encoders[fixed_encoder_index], inst);
    }
    case LambdaKind::lambda_fg_of_g: {
      auto encoders = inst.compose_encoders(split);
      if (fixed_encoder_index >= encoders.size())
        throw std::runtime_error("fixed encoder index out of range");
      return lambda_fg_of_g(inst.compose_predictors(split), encoders,
                            encoders[fixed_encoder_index], inst);
    }
    case LambdaKind::lambda_fg_joint:
      return lambda_fg_joint(inst.compose_predictors(split),
                             inst.compose_encoders(split), inst);
  }
  throw std::runtime_error("unreachable lambda kind");
}

std::string BoundReport::to_json() const {
  nlohmann::json j;
  j["instance_id"] = instance_id;
  j["split"] = split;
  j["f_index"] = f_index;
  j["g_index"] = g_index;
  j["r_s"] = r_s;
  j["r_t"] = r_t;
  j["composed"] = {{"d_hdh", d_hdh}, {"lambda_h", lam_h}, {"rhs", composed_rhs},
               {"violated", composed_violated}};
  j["prior"] = {{"d_latent", d_latent}, {"lambda_f_of_g", lam_f_of_g},
                {"rhs", prior_rhs}, {"violated", prior_violated}};
  j["main"] = {{"d_latent", d_latent}, {"d_fgdg", d_fgdg},
               {"lambda_fg_of_g", lam_fg_of_g}, {"rhs", main_rhs},
               {"violated", main_violated}};
  j["tighter"] = tighter;
  return j.dump(2);
}

BoundReport bound_report(const FiniteInstance& instance, std::size_t split,
                         std::size_t f_index, std::size_t g_index,
                         std::size_t budget) {
  instance.validate();
  auto predictors = instance.compose_predictors(split);
  auto encoders = instance.compose_encoders(split);
  if (f_index >= predictors.size() || g_index >= encoders.size())
    throw std::runtime_error("bound_report: (f, g) index out of range");

  BoundReport rep;
  rep.instance_id = instance.id;
  rep.split = split;
  rep.f_index = f_index;
  rep.g_index = g_index;

  const auto& f = predictors[f_index];
  const auto& g = encoders[g_index];
  FiniteFunction h = composed(f, g);
  rep.r_s = label_risk(h, instance.src_points, instance.src_labels);
  rep.r_t = label_risk(h, instance.tgt_points, instance.tgt_labels);

  auto hypotheses = instance.compose_encoders(instance.depth());
  rep.d_hdh = hdh_divergence(hypotheses, instance.src_points,
                             instance.tgt_points, budget);
  rep.lam_h = lambda_h(hypotheses, instance);
  rep.composed_rhs = rep.r_s + rep.d_hdh + rep.lam_h;

  rep.d_latent = latent_divergence(predictors, g, instance.src_points,
                                   instance.tgt_points, budget);
  rep.lam_f_of_g = lambda_f_of_g(predictors, g, instance);
  rep.prior_rhs = rep.r_s + rep.d_latent + rep.lam_f_of_g;

  rep.d_fgdg = f_gdg_divergence(predictors, encoders, instance.src_points,
                                instance.tgt_points, budget);
  rep.lam_fg_of_g = lambda_fg_of_g(predictors, encoders, g, instance);
  rep.main_rhs = rep.r_s + rep.d_latent + rep.d_fgdg + rep.lam_fg_of_g;

  rep.composed_violated = rep.composed_rhs < rep.r_t - kViolationSlack;
  rep.prior_violated = rep.prior_rhs < rep.r_t - kViolationSlack;
  rep.main_violated = rep.main_rhs < rep.r_t - kViolationSlack;
  rep.tighter = rep.main_rhs <= rep.composed_rhs ? "main" : "composed";
  return rep;
}

LayerBoundSweep layer_bound_sweep(const FiniteInstance& instance,
                                  const std::vector<std::size_t>& layer_choice,
                                  std::size_t budget) {
  instance.validate();
  if (layer_choice.size() != instance.depth())
    throw std::runtime_error("layer_choice must pick one function per layer");
  for (std::size_t k = 0; k < layer_choice.size(); ++k)
    if (layer_choice[k] >= instance.layers[k].size())
      throw std::runtime_error("layer_choice out of range at layer " +
                               std::to_string(k + 1));

  // forward path of the chosen hypothesis, per split
  std::vector<FiniteFunction> g_path(instance.depth() + 1);
  g_path[0] = [&] {
    FiniteFunction id(instance.space_sizes[0]);
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<int>(i);
    return id;
  }();
  for (std::size_t k = 1; k <= instance.depth(); ++k)
    g_path[k] = composed(instance.layers[k - 1][layer_choice[k - 1]],
                         g_path[k - 1]);

  LayerBoundSweep sweep;
  const FiniteFunction& h = g_path.back();
  sweep.r_s = label_risk(h, instance.src_points, instance.src_labels);
  sweep.r_t = label_risk(h, instance.tgt_points, instance.tgt_labels);

  sweep.min_rhs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < instance.depth(); ++i) {
    auto predictors = instance.compose_predictors(i);
    auto encoders = instance.compose_encoders(i);
    double d_lat = latent_divergence(predictors, g_path[i], instance.src_points,
                                     instance.tgt_points, budget);
    double d_fgdg = f_gdg_divergence(predictors, encoders, instance.src_points,
                                     instance.tgt_points, budget);
    double lam = lambda_fg_of_g(predictors, encoders, g_path[i], instance);
    double rhs = sweep.r_s + d_lat + d_fgdg + lam;
    sweep.per_split_rhs.push_back(rhs);
    if (rhs < sweep.min_rhs) {
      sweep.min_rhs = rhs;
      sweep.argmin_split = i;
    }
  }
  return sweep;
}

SplitClassSet split_classes(const FiniteInstance& instance) {
  SplitClassSet out;
  for (std::size_t i = 1; i < instance.depth(); ++i) {
    out.predictors.push_back(instance.compose_predictors(i));
    out.encoders.push_back(instance.compose_encoders(i));
  }
  return out;
}

SplitClassSet corrupted_split_classes(const FiniteInstance& instance, Rng& rng) {
  SplitClassSet out = split_classes(instance);
  // break nesting at the deepest split: G_{N-1} becomes unrelated tables
  if (out.encoders.empty()) return out;
  std::size_t deepest = out.encoders.size() - 1;
  std::size_t code_space = instance.space_sizes[deepest + 1];
  for (auto& g : out.encoders[deepest])
    for (auto& v : g) v = static_cast<int>(rng.below(code_space));
  return out;
}

MonotonicityResult monotonicity_check_explicit(const SplitClassSet& classes,
                                               const FiniteInstance& instance,
                                               std::size_t budget) {
  std::size_t n_splits = classes.predictors.size();
  MonotonicityResult res;
  for (std::size_t s = 0; s < n_splits; ++s) {
    res.fgdg_per_split.push_back(
        f_gdg_divergence(classes.predictors[s], classes.encoders[s],
                         instance.src_points, instance.tgt_points, budget));
    double sup = 0.0;
    for (const auto& g : classes.encoders[s])
      sup = std::max(sup, latent_divergence(classes.predictors[s], g,
                                            instance.src_points,
                                            instance.tgt_points, budget));
    res.latent_sup_per_split.push_back(sup);
  }

  for (std::size_t i = 0; i < n_splits; ++i)
    for (std::size_t j = i; j < n_splits; ++j) {
      if (res.fgdg_per_split[i] > res.fgdg_per_split[j] + kViolationSlack) {
        ++res.violations;
        res.witnesses.push_back({i + 1, j + 1, "embedding_complexity",
                                 res.fgdg_per_split[i], res.fgdg_per_split[j]});
      }
      if (res.latent_sup_per_split[i] <
          res.latent_sup_per_split[j] - kViolationSlack) {
        ++res.violations;
        res.witnesses.push_back({i + 1, j + 1, "latent",
                                 res.latent_sup_per_split[i],
                                 res.latent_sup_per_split[j]});
      }
    }
  return res;
}

MonotonicityResult monotonicity_check(const FiniteInstance& instance,
                                      std::size_t budget) {
  instance.validate();
  return monotonicity_check_explicit(split_classes(instance), instance, budget);
}

}  // namespace dalab
