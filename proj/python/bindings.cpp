#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dalab/bounds.hpp"
#include "dalab/dataset.hpp"
#include "dalab/divergence.hpp"
#include "dalab/finite.hpp"
#include "dalab/net.hpp"
#include "dalab/schedule.hpp"
#include "dalab/sweep.hpp"
#include "dalab/train.hpp"

namespace py = pybind11;
using namespace dalab;

namespace {

Tensor tensor_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::runtime_error("empty feature matrix");
  std::size_t d = rows.front().size();
  Tensor t({rows.size(), d});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != d)
      throw std::runtime_error("ragged feature matrix");
    for (std::size_t c = 0; c < d; ++c) t.at(r, c) = rows[r][c];
  }
  return t;
}

std::vector<std::vector<double>> tensor_to_rows(const Tensor& t) {
  std::vector<std::vector<double>> rows(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    rows[r].resize(t.cols());
    for (std::size_t c = 0; c < t.cols(); ++c) rows[r][c] = t.at(r, c);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_dalab, m) {
  m.doc() = "desk-scale domain adaptation laboratory";

  py::class_<DomainDataset>(m, "DomainDataset")
      .def(py::init([](const std::vector<std::vector<double>>& features,
                       const std::vector<int>& labels) {
             DomainDataset d;
             d.features = tensor_from_rows(features);
             d.labels = labels;
             if (d.labels.size() != d.size())
               throw std::runtime_error("labels/features length mismatch");
             return d;
           }),
           py::arg("features"), py::arg("labels"))
      .def_property_readonly("features",
                             [](const DomainDataset& d) {
                               return tensor_to_rows(d.features);
                             })
      .def_readonly("labels", &DomainDataset::labels)
      .def("__len__", &DomainDataset::size)
      .def_property_readonly("dim", &DomainDataset::dim);

  m.def(
      "generate_figure1_toy",
      [](double epsilon, std::size_t n, double separation, double noise,
         std::uint64_t seed) {
        return generate_figure1_toy({epsilon, n, separation, noise}, seed);
      },
      py::arg("epsilon") = 0.1, py::arg("n_per_domain") = 1000,
      py::arg("cluster_separation") = 4.0, py::arg("noise_sigma") = 0.25,
      py::arg("seed") = 0);
  m.def(
      "generate_moons_shift",
      [](double rotation_deg, double epsilon, std::size_t n, double noise,
         std::uint64_t seed) {
        return generate_moons_shift({rotation_deg, epsilon, n, noise}, seed);
      },
      py::arg("rotation_deg") = 30.0, py::arg("epsilon") = 0.0,
      py::arg("n_per_domain") = 1000, py::arg("noise_sigma") = 0.1,
      py::arg("seed") = 0);
  m.def("load_csv", &load_csv, py::arg("path"));
  m.def("save_csv", &save_csv, py::arg("dataset"), py::arg("path"));

  m.def("alpha_schedule", &alpha_schedule, py::arg("p"), py::arg("alpha_max"));
  m.def(
      "layer_weights",
      [](const std::string& scheme, double alpha0, std::size_t num_layers,
         double progress) {
        return layer_weights(weight_scheme_from_string(scheme), alpha0,
                             num_layers, progress);
      },
      py::arg("scheme"), py::arg("alpha0"), py::arg("num_layers"),
      py::arg("progress"));

  py::class_<LayeredNet>(m, "LayeredNet")
      .def_property_readonly("depth", &LayeredNet::depth)
      .def_property_readonly("num_classes", &LayeredNet::num_classes)
      .def("predict",
           [](const LayeredNet& net,
              const std::vector<std::vector<double>>& x) {
             return net.predict(tensor_from_rows(x));
           })
      .def("predict_proba",
           [](const LayeredNet& net,
              const std::vector<std::vector<double>>& x) {
             return tensor_to_rows(net.predict_proba(tensor_from_rows(x)));
           })
      .def("save", &LayeredNet::save)
      .def_static("load", &LayeredNet::load);
  m.def("zero_one_risk", &zero_one_risk, py::arg("net"), py::arg("dataset"));

  py::class_<EpochRow>(m, "EpochRow")
      .def_readonly("epoch", &EpochRow::epoch)
      .def_readonly("src_train_err", &EpochRow::src_train_err)
      .def_readonly("src_val_err", &EpochRow::src_val_err)
      .def_readonly("tgt_err", &EpochRow::tgt_err)
      .def_readonly("alpha", &EpochRow::alpha)
      .def_readonly("disc_loss", &EpochRow::disc_loss)
      .def_readonly("proxy_div", &EpochRow::proxy_div);

  py::class_<TrainReport>(m, "TrainReport")
      .def_readonly("aligned_layers", &TrainReport::aligned_layers)
      .def_readonly("epochs", &TrainReport::epochs)
      .def_readonly("selected_epoch", &TrainReport::selected_epoch)
      .def_readonly("selected_src_val_err", &TrainReport::selected_src_val_err)
      .def_readonly("selected_tgt_err", &TrainReport::selected_tgt_err)
      .def_readonly("final_tgt_err", &TrainReport::final_tgt_err)
      .def_readonly("diverged", &TrainReport::diverged)
      .def("to_csv", &TrainReport::to_csv);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("net", &TrainResult::net)
      .def_readonly("report", &TrainResult::report);

  auto make_config = [](const std::vector<std::size_t>& widths,
                        std::size_t split_index,
                        const std::vector<std::size_t>& aligned_layers,
                        const std::string& scheme, double alpha0,
                        std::size_t epochs, std::size_t batch_size, double lr,
                        std::uint64_t seed, double val_fraction,
                        const std::vector<std::size_t>& disc_hidden) {
    TrainConfig cfg;
    cfg.widths = widths;
    cfg.split_index = split_index;
    cfg.aligned_layers = aligned_layers;
    cfg.scheme = weight_scheme_from_string(scheme);
    cfg.alpha0 = alpha0;
    cfg.epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.lr = lr;
    cfg.seed = seed;
    cfg.val_fraction = val_fraction;
    cfg.disc_hidden = disc_hidden;
    return cfg;
  };

  m.def(
      "dann_train",
      [make_config](const DomainDataset& source, const DomainDataset& target,
                    const std::vector<std::size_t>& widths,
                    std::size_t split_index, double alpha0, std::size_t epochs,
                    std::size_t batch_size, double lr, std::uint64_t seed,
                    double val_fraction,
                    const std::vector<std::size_t>& disc_hidden) {
        return dann_train(make_config(widths, split_index, {}, "uniform",
                                      alpha0, epochs, batch_size, lr, seed,
                                      val_fraction, disc_hidden),
                          source, target);
      },
      py::arg("source"), py::arg("target"), py::arg("widths"),
      py::arg("split_index") = 1, py::arg("alpha0") = 0.1,
      py::arg("epochs") = 50, py::arg("batch_size") = 64, py::arg("lr") = 1e-3,
      py::arg("seed") = 0, py::arg("val_fraction") = 0.2,
      py::arg("disc_hidden") = std::vector<std::size_t>{64, 64});

  m.def(
      "mdm_train",
      [make_config](const DomainDataset& source, const DomainDataset& target,
                    const std::vector<std::size_t>& widths,
                    const std::vector<std::size_t>& aligned_layers,
                    const std::string& scheme, double alpha0,
                    std::size_t epochs, std::size_t batch_size, double lr,
                    std::uint64_t seed, double val_fraction,
                    const std::vector<std::size_t>& disc_hidden) {
        return mdm_train(make_config(widths, 1, aligned_layers, scheme, alpha0,
                                     epochs, batch_size, lr, seed,
                                     val_fraction, disc_hidden),
                         source, target);
      },
      py::arg("source"), py::arg("target"), py::arg("widths"),
      py::arg("aligned_layers"), py::arg("scheme") = "uniform",
      py::arg("alpha0") = 0.1, py::arg("epochs") = 50,
      py::arg("batch_size") = 64, py::arg("lr") = 1e-3, py::arg("seed") = 0,
      py::arg("val_fraction") = 0.2,
      py::arg("disc_hidden") = std::vector<std::size_t>{64, 64});

  py::class_<FiniteInstance>(m, "FiniteInstance")
      .def_readonly("id", &FiniteInstance::id)
      .def_readonly("space_sizes", &FiniteInstance::space_sizes)
      .def_property_readonly("depth", &FiniteInstance::depth)
      .def("to_json", &FiniteInstance::to_json)
      .def_static("from_json", &FiniteInstance::from_json)
      .def("save", &FiniteInstance::save)
      .def_static("load", &FiniteInstance::load);

  m.def(
      "random_instance",
      [](std::uint64_t seed, std::size_t max_depth, std::size_t max_space,
         std::size_t max_funcs, std::size_t max_points,
         const std::string& id) {
        Rng rng(seed);
        InstanceRanges ranges;
        ranges.max_depth = max_depth;
        ranges.max_space = max_space;
        ranges.max_funcs_per_layer = max_funcs;
        ranges.max_points = max_points;
        return random_instance(rng, ranges, id);
      },
      py::arg("seed"), py::arg("max_depth") = 4, py::arg("max_space") = 4,
      py::arg("max_funcs") = 3, py::arg("max_points") = 16,
      py::arg("id") = "py");

  m.def(
      "exact_divergence",
      [](const std::string& flavor, const FiniteInstance& inst,
         std::size_t split, std::size_t fixed_encoder_index,
         std::size_t budget) {
        DivergenceEstimate e =
            exact_divergence(divergence_flavor_from_string(flavor), inst,
                             split, fixed_encoder_index, budget);
        py::dict d;
        d["value"] = e.value;
        d["flavor"] = e.flavor;
        d["class_size_f"] = e.class_size_f;
        d["class_size_g"] = e.class_size_g;
        d["pairs_evaluated"] = e.pairs_evaluated;
        return d;
      },
      py::arg("flavor"), py::arg("instance"), py::arg("split") = 1,
      py::arg("fixed_encoder_index") = 0,
      py::arg("budget") = kDefaultEnumerationBudget);

  m.def(
      "bound_report",
      [](const FiniteInstance& inst, std::size_t split, std::size_t f_index,
         std::size_t g_index) {
        BoundReport r = bound_report(inst, split, f_index, g_index);
        py::dict d;
        d["instance_id"] = r.instance_id;
        d["split"] = r.split;
        d["r_s"] = r.r_s;
        d["r_t"] = r.r_t;
        d["d_hdh"] = r.d_hdh;
        d["lam_h"] = r.lam_h;
        d["composed_rhs"] = r.composed_rhs;
        d["d_latent"] = r.d_latent;
        d["lam_f_of_g"] = r.lam_f_of_g;
        d["prior_rhs"] = r.prior_rhs;
        d["d_fgdg"] = r.d_fgdg;
        d["lam_fg_of_g"] = r.lam_fg_of_g;
        d["main_rhs"] = r.main_rhs;
        d["composed_violated"] = r.composed_violated;
        d["prior_violated"] = r.prior_violated;
        d["main_violated"] = r.main_violated;
        d["tighter"] = r.tighter;
        return d;
      },
      py::arg("instance"), py::arg("split") = 1, py::arg("f_index") = 0,
      py::arg("g_index") = 0);

  m.def(
      "monotonicity_check",
      [](const FiniteInstance& inst) {
        MonotonicityResult r = monotonicity_check(inst);
        py::dict d;
        d["violations"] = r.violations;
        d["fgdg_per_split"] = r.fgdg_per_split;
        d["latent_sup_per_split"] = r.latent_sup_per_split;
        return d;
      },
      py::arg("instance"));

  m.def(
      "certify_bounds",
      [](std::size_t instances, std::uint64_t seed, const std::string& out_dir,
         bool inject_corruption) {
        CertifyConfig cc;
        cc.instances = instances;
        cc.seed = seed;
        cc.out_dir = out_dir;
        cc.inject_corruption = inject_corruption;
        CertifySummary s = certify_bounds(cc);
        py::dict d;
        d["instances"] = s.instances;
        d["pairs_checked"] = s.pairs_checked;
        d["composed_violations"] = s.composed_violations;
        d["main_violations"] = s.main_violations;
        d["min_split_violations"] = s.min_split_violations;
        d["monotonicity_violations"] = s.monotonicity_violations;
        d["total_violations"] = s.total_violations();
        return d;
      },
      py::arg("instances") = 20, py::arg("seed") = 7,
      py::arg("out_dir") = "out", py::arg("inject_corruption") = false);

  m.def(
      "run_experiment",
      [](const std::string& config_json, std::size_t jobs) {
        ExperimentConfig cfg = ExperimentConfig::from_json(config_json);
        SweepResult res = run_experiment(cfg, jobs);
        py::list rows;
        for (const auto& a : res.aggregate) {
          py::dict d;
          d["axis_value"] = a.axis_value;
          d["tgt_err_mean"] = a.tgt_err_mean;
          d["tgt_err_std"] = a.tgt_err_std;
          d["src_err_mean"] = a.src_err_mean;
          d["src_err_std"] = a.src_err_std;
          d["n_seeds"] = a.n_seeds;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config_json"), py::arg("jobs") = 1);
}
