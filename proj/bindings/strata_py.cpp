#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "strata/ensemble.hpp"
#include "strata/experiment.hpp"
#include "strata/manifolds.hpp"
#include "strata/metrics.hpp"

namespace py = pybind11;
using namespace strata;

namespace {

StepConfig make_step_config(double dt, int midpoint_iters, int normal_iters,
                            const std::string& algorithm) {
  StepConfig cfg;
  cfg.dt = dt;
  cfg.midpoint_iters = midpoint_iters;
  cfg.normal_iters = normal_iters;
  cfg.algorithm = algorithm_from_string(algorithm);
  return cfg;
}

py::dict result_to_dict(const EnsembleResult& r) {
  py::dict d;
  d["times"] = r.times;
  d["observables"] = r.observable_names;
  d["means"] = r.means;
  d["sigmas"] = r.sigmas;
  d["constraint_mean"] = Vec(r.constraint_mean);
  d["n_traj"] = r.n_traj;
  d["seed"] = r.seed;
  d["rejections"] = r.rejections;
  return d;
}

}  // namespace

PYBIND11_MODULE(_strata, m) {
  m.doc() = "Projected Stratonovich SDE integrators on constraint manifolds";
  m.attr("__version__") = kVersion;

  py::register_exception<InvalidStateError>(m, "InvalidStateError");
  py::register_exception<RankDeficiencyError>(m, "RankDeficiencyError");
  py::register_exception<DivergenceError>(m, "DivergenceError");
  py::register_exception<NotAvailableError>(m, "NotAvailableError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<ManifoldSpec>(m, "ManifoldSpec")
      .def_readonly("ambient_dim", &ManifoldSpec::ambient_dim)
      .def_readonly("num_constraints", &ManifoldSpec::num_constraints)
      .def("constraints",
           [](const ManifoldSpec& spec, const Vec& x) { return eval_constraints(spec, x); })
      .def("gradients", [](const ManifoldSpec& spec, const Vec& x) {
        return constraint_gradients(spec, x);
      });

  py::class_<CatalogEntry>(m, "CatalogEntry")
      .def_readonly("name", &CatalogEntry::name)
      .def_readonly("params", &CatalogEntry::params)
      .def_readonly("manifold", &CatalogEntry::manifold)
      .def_property_readonly("observables",
                             [](const CatalogEntry& e) {
                               std::vector<std::string> names;
                               for (const auto& o : e.observables)
                                 names.push_back(o.name);
                               return names;
                             })
      .def_property_readonly("initial_state",
                             [](const CatalogEntry& e) { return e.problem.initial_state; })
      .def("has_intrinsic_model",
           [](const CatalogEntry& e) { return e.intrinsic.has_value(); })
      .def("oracle", [](const CatalogEntry& e, const std::string& obs, double t) {
        auto it = e.oracles.find(obs);
        if (it == e.oracles.end())
          throw NotAvailableError("no oracle for observable '" + obs + "'");
        return it->second(t);
      });

  m.def("catalog", &catalog, py::arg("name"),
        py::arg("params") = std::map<std::string, double>{},
        "Construct a catalog manifold entry by name");

  m.def("make_quadratic", &make_quadratic, py::arg("f0"), py::arg("h"), py::arg("g"),
        "Single quadratic constraint f(y) = f0 + h.y + y^T G y");

  m.def("eval_constraints", &eval_constraints);
  m.def("constraint_gradients", &constraint_gradients);
  m.def(
      "tangential_project",
      [](const Vec& delta, const Vec& x, const ManifoldSpec& spec) {
        return tangential_project(delta, x, spec);
      },
      py::arg("delta"), py::arg("x"), py::arg("manifold"));
  m.def("normal_project", &normal_project, py::arg("x"), py::arg("manifold"),
        py::arg("max_iters") = 3);

  m.def(
      "gaussian_increments",
      [](std::uint64_t seed, std::uint64_t trajectory, std::uint64_t step, int s,
         double dt) { return gaussian_increments({seed, trajectory}, step, s, dt); },
      py::arg("seed"), py::arg("trajectory"), py::arg("step"), py::arg("s"),
      py::arg("dt"), "Counter-addressed N(0, dt) increments");

  m.def(
      "step",
      [](const CatalogEntry& entry, const std::string& algorithm, const Vec& x0,
         double t0, double dt, const Vec& dw, int midpoint_iters, int normal_iters) {
        const StepConfig cfg =
            make_step_config(dt, midpoint_iters, normal_iters, algorithm);
        detail::StepperWorkspace ws;
        ws.resize(entry.problem.dim, entry.problem.noise_dim,
                  entry.manifold.num_constraints);
        Vec out(entry.problem.dim);
        detail::step_dispatch(entry.problem, x0, t0, cfg, dw, ws, out);
        return out;
      },
      py::arg("entry"), py::arg("algorithm"), py::arg("x0"), py::arg("t0"),
      py::arg("dt"), py::arg("dw"), py::arg("midpoint_iters") = 3,
      py::arg("normal_iters") = 3,
      "One projected step of a catalog problem");

  m.def(
      "integrate_ensemble",
      [](const CatalogEntry& entry, const std::string& algorithm, double dt,
         long long n_traj, double t_max, std::uint64_t seed, int midpoint_iters,
         int normal_iters, int workers, int output_points) {
        StepConfig cfg = make_step_config(dt, midpoint_iters, normal_iters, algorithm);
        EnsembleOptions opt;
        opt.workers = workers;
        opt.output_points = output_points;
        return result_to_dict(integrate_ensemble(entry.problem, cfg, n_traj, t_max,
                                                 entry.observables, seed, opt));
      },
      py::arg("entry"), py::arg("algorithm"), py::arg("dt"), py::arg("n_traj"),
      py::arg("t_max"), py::arg("seed") = 42, py::arg("midpoint_iters") = 3,
      py::arg("normal_iters") = 3, py::arg("workers") = 0,
      py::arg("output_points") = 50,
      "Ensemble means, batch sampling errors and constraint residuals");

  m.def(
      "integrate_intrinsic",
      [](const CatalogEntry& entry, double dt, long long n_traj, double t_max,
         std::uint64_t seed, int midpoint_iters, int workers, int output_points) {
        const IntrinsicModel im = intrinsic_model(entry);
        StepConfig cfg =
            make_step_config(dt, midpoint_iters, 1, "midpoint_unconstrained");
        EnsembleOptions opt = im.ensemble_options();
        opt.workers = workers;
        opt.output_points = output_points;
        return result_to_dict(integrate_ensemble(im.as_problem(), cfg, n_traj, t_max,
                                                 entry.observables, seed, opt));
      },
      py::arg("entry"), py::arg("dt"), py::arg("n_traj"), py::arg("t_max"),
      py::arg("seed") = 42, py::arg("midpoint_iters") = 3, py::arg("workers") = 0,
      py::arg("output_points") = 50,
      "Intrinsic-coordinate reference ensemble (observables on embedded states)");

  m.def("kubo_moment", &kubo_moment, py::arg("m"), py::arg("t"), py::arg("omega0"),
        py::arg("b"));
  m.def("catenoid_msd", &catenoid_msd, py::arg("t"));
  m.def("hypersphere_msd", &hypersphere_msd, py::arg("n"), py::arg("t"));
  m.def("euclidean_dist_sq", &euclidean_dist_sq);
  m.def("great_circle_dist", &great_circle_dist, py::arg("x"), py::arg("y"),
        py::arg("g"));

  m.def(
      "run_experiment",
      [](const std::string& config_path) {
        std::vector<std::string> bundles;
        for (const auto& cfg : parse_config_file(config_path)) {
          bundles.push_back(run_experiment(cfg).bundle_dir);
        }
        return bundles;
      },
      py::arg("config_path"), "Run every experiment section of a config file");
  m.def("emit_plot_data", &emit_plot_data, py::arg("bundle_dir"));
}
