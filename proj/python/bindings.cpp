#include "lancorr/central.hpp"
#include "lancorr/config.hpp"
#include "lancorr/errors.hpp"
#include "lancorr/mc.hpp"
#include "lancorr/output.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace lancorr;

namespace {

std::vector<double> as_vector(const py::iterable& values) {
  std::vector<double> out;
  for (auto v : values) out.push_back(v.cast<double>());
  return out;
}

py::dict fit_dict(const FitResult& fit) {
  py::dict d;
  d["theta"] = fit.theta;
  d["sigma"] = fit.sigma;
  std::vector<std::vector<double>> cov(fit.order(), std::vector<double>(fit.order()));
  for (std::size_t i = 0; i < fit.order(); ++i) {
    for (std::size_t j = 0; j < fit.order(); ++j) cov[i][j] = fit.sigma_tilde(i, j);
  }
  d["sigma_tilde"] = cov;
  d["residuals"] = fit.residuals;
  d["n"] = fit.n;
  return d;
}

ScoreFamily family_from(const std::string& name, double nu) {
  if (name == "gaussian") return ScoreFamily::gaussian();
  if (name == "student-t" || name == "t") return ScoreFamily::student_t(nu);
  throw DomainError("unknown family '" + name + "' (expected gaussian or student-t)");
}

}  // namespace

PYBIND11_MODULE(_lancorr, m) {
  m.doc() = "Locally asymptotically normal tests for perturbed autoregressions";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<StationarityError>(m, "StationarityError", base.ptr());
  py::register_exception<DegenerateDesignError>(m, "DegenerateDesignError", base.ptr());
  py::register_exception<DegenerateVarianceError>(m, "DegenerateVarianceError", base.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());
  py::register_exception<ConditionViolation>(m, "ConditionViolation", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<ExperimentError>(m, "ExperimentError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<ScoreFamily>(m, "ScoreFamily")
      .def_static("gaussian", &ScoreFamily::gaussian)
      .def_static("student_t", &ScoreFamily::student_t, py::arg("nu"))
      .def_property_readonly("name", &ScoreFamily::name)
      .def_property_readonly("dof", &ScoreFamily::dof)
      .def("density", &ScoreFamily::density)
      .def("score", &ScoreFamily::score)
      .def("nf", &ScoreFamily::nf)
      .def("fisher_moment", &ScoreFamily::fisher_moment, py::arg("j"))
      .def("__eq__", [](const ScoreFamily& a, const ScoreFamily& b) { return a == b; })
      .def("__repr__", [](const ScoreFamily& f) { return "ScoreFamily(" + f.name() + ")"; });

  m.def(
      "check_regularity",
      [](const ScoreFamily& family) {
        const auto rep = check_regularity(family);
        py::dict d;
        d["values"] = rep.values;
        d["targets"] = rep.targets;
        d["residuals"] = rep.residuals;
        d["tail"] = rep.tail;
        d["moments"] = rep.moments;
        d["tail_flag"] = rep.tail_flag;
        d["max_abs_residual"] = rep.max_abs_residual();
        d["passes"] = rep.passes();
        return d;
      },
      py::arg("family"));

  m.def(
      "simulate",
      [](const std::string& model, const py::iterable& theta, std::size_t n, std::uint64_t seed,
         double alpha, double beta, const std::string& G, const std::string& L, const std::string& family,
         double nu, std::size_t burn_in) {
        ModelConfig cfg;
        cfg.kind = parse_model_kind(model);
        cfg.theta = as_vector(theta);
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.G = Perturbation::parse(G);
        cfg.L = Perturbation::parse(L);
        cfg.B = cfg.L.scaled(2.0);
        cfg.family = family_from(family, nu);
        cfg.burn_in = burn_in;
        return simulate(cfg, n, seed).y;
      },
      py::arg("model"), py::arg("theta"), py::arg("n"), py::arg("seed"), py::arg("alpha") = 0.0,
      py::arg("beta") = 0.0, py::arg("G") = "inv_quad", py::arg("L") = "inv_quad",
      py::arg("family") = "gaussian", py::arg("nu") = 5.0, py::arg("burn_in") = 500);

  m.def(
      "fit_lse",
      [](const std::vector<double>& y, std::size_t order) {
        return fit_dict(order == 1 ? fit_ar1_lse(y) : fit_arm_lse(y, order));
      },
      py::arg("y"), py::arg("order") = 1);

  m.def(
      "confidence_intervals",
      [](const std::vector<double>& y, std::size_t order, double level) {
        const auto fit = order == 1 ? fit_ar1_lse(y) : fit_arm_lse(y, order);
        const auto cis = order == 1 ? std::vector<Interval>{ci_univariate(fit, level)}
                                    : ci_simultaneous(fit, level);
        std::vector<std::pair<double, double>> out;
        for (const auto& ci : cis) out.emplace_back(ci.lower, ci.upper);
        return out;
      },
      py::arg("y"), py::arg("order") = 1, py::arg("level") = 0.95);

  m.def("extended_size",
        [](std::size_t n, double S, int offset) { return SEstimatorConfig{S, offset}.extended_size(n); },
        py::arg("n"), py::arg("S") = 1.0, py::arg("exponent_offset") = 1);

  m.def(
      "central",
      [](const std::vector<double>& y, const py::iterable& theta, const std::string& model,
         const std::string& G, const std::string& L, const std::string& family, double nu,
         const std::string& moments) {
        ModelConfig cfg;
        cfg.kind = parse_model_kind(model);
        cfg.theta = as_vector(theta);
        cfg.G = Perturbation::parse(G);
        cfg.L = Perturbation::parse(L);
        cfg.B = cfg.L.scaled(2.0);
        cfg.family = family_from(family, nu);
        if (moments != "population" && moments != "residual") {
          throw DomainError("moments must be population or residual");
        }
        const auto eval = central_for(cfg, y, cfg.theta,
                                      moments == "population" ? MomentSource::Population
                                                              : MomentSource::Residual);
        py::dict d;
        d["v"] = eval.v;
        d["grad"] = eval.grad;
        d["tau2"] = eval.tau2;
        d["tau2_clipped"] = eval.tau2_clipped;
        d["n"] = eval.n;
        return d;
      },
      py::arg("y"), py::arg("theta"), py::arg("model") = "ar1", py::arg("G") = "inv_quad",
      py::arg("L") = "inv_quad", py::arg("family") = "gaussian", py::arg("nu") = 5.0,
      py::arg("moments") = "population");

  m.def("theoretical_power",
        [](double tau2, double alpha, const std::string& convention) {
          if (convention != "tau" && convention != "tau2") throw DomainError("convention must be tau or tau2");
          return theoretical_power(tau2, alpha,
                                   convention == "tau" ? PowerConvention::LeCamTau
                                                       : PowerConvention::TauSquared);
        },
        py::arg("tau2"), py::arg("alpha") = 0.05, py::arg("convention") = "tau");

  m.def(
      "ks_normality",
      [](const std::vector<double>& x, double level) {
        const auto r = ks_normality(x, level);
        py::dict d;
        d["statistic"] = r.statistic;
        d["p_value"] = r.p_value;
        d["critical_value"] = r.critical_value;
        d["pass"] = r.pass;
        return d;
      },
      py::arg("samples"), py::arg("level") = 0.01);

  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("replicate_id"), py::arg("stream"));

  m.def(
      "normalize_config",
      [](const std::string& text, const std::map<std::string, std::string>& overrides) {
        std::vector<Override> ov(overrides.begin(), overrides.end());
        return render_config(parse_config(text, ov));
      },
      py::arg("text"), py::arg("overrides") = std::map<std::string, std::string>{},
      "Parse a config and return its canonical text.");

  m.def(
      "run_experiment",
      [](const std::string& text, const std::map<std::string, std::string>& overrides) {
        std::vector<Override> ov(overrides.begin(), overrides.end());
        const auto cfg = parse_config(text, ov);
        PowerCurve curve;
        {
          py::gil_scoped_release release;
          curve = run_experiment(cfg);
        }
        py::list rows;
        for (const auto& e : curve.entries) {
          py::dict d;
          d["n"] = e.n;
          d["flavor"] = to_string(e.flavor);
          d["rejections"] = e.rejections;
          d["replicates"] = e.replicates;
          d["failures"] = e.failures;
          d["power"] = e.power;
          d["mc_se"] = e.mc_se;
          d["tau2_mean"] = e.tau2_mean;
          d["theory_tau"] = e.theory_tau;
          d["theory_tau2"] = e.theory_tau2;
          rows.append(d);
        }
        std::ostringstream csv;
        write_power_csv(csv, curve);
        return py::make_tuple(rows, csv.str());
      },
      py::arg("text"), py::arg("overrides") = std::map<std::string, std::string>{},
      "Run a Monte Carlo power study; returns (rows, csv_text).");

  m.def(
      "grad_check",
      [](const std::string& setting, const ScoreFamily& family, std::size_t instances, std::uint64_t seed) {
        Setting s = Setting::AR1;
        if (setting == "arch") {
          s = Setting::ARCH;
        } else if (setting == "general" || setting == "arm") {
          s = Setting::General;
        } else if (setting != "ar1") {
          throw DomainError("setting must be ar1, arch or general");
        }
        return grad_check_study(s, family, instances, seed).max_rel_error;
      },
      py::arg("setting"), py::arg("family"), py::arg("instances") = 100, py::arg("seed") = 1);
}
