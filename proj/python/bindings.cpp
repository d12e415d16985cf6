#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "celdyn/closed_form.hpp"
#include "celdyn/errors.hpp"
#include "celdyn/fock_oracle.hpp"
#include "celdyn/moment_ode.hpp"
#include "celdyn/sweep_io.hpp"
#include "celdyn/verify.hpp"

namespace py = pybind11;
using namespace celdyn;

namespace {

SystemParams make_params(double A, double kappa, double Omega, double gamma, double Gamma,
                         double theta) {
  return {A, kappa, Omega, gamma, Gamma, theta};
}

std::vector<double> as_grid(py::array_t<double, py::array::c_style | py::array::forcecast> t) {
  return {t.data(), t.data() + t.size()};
}

// Columns u, v, w as a (n, 3) array.
py::array_t<double> moment_array(const std::vector<MomentState>& states) {
  py::array_t<double> out({static_cast<py::ssize_t>(states.size()), py::ssize_t{3}});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < states.size(); ++i) {
    view(i, 0) = states[i].u;
    view(i, 1) = states[i].v;
    view(i, 2) = states[i].w;
  }
  return out;
}

py::dict records_to_columns(const std::vector<CurveRecord>& rows) {
  const auto n = static_cast<py::ssize_t>(rows.size());
  py::array_t<double> t(n), dm(n), dp(n), nbar(n), u(n), v(n), w(n);
  py::list preset, engine, errors;
  for (py::ssize_t i = 0; i < n; ++i) {
    const CurveRecord& r = rows[i];
    t.mutable_at(i) = r.t;
    dm.mutable_at(i) = r.dc_minus_sq;
    dp.mutable_at(i) = r.dc_plus_sq;
    nbar.mutable_at(i) = r.nbar;
    u.mutable_at(i) = r.u;
    v.mutable_at(i) = r.v;
    w.mutable_at(i) = r.w;
    preset.append(r.preset);
    engine.append(std::string(to_string(r.engine)));
    errors.append(r.error);
  }
  py::dict d;
  d["preset"] = preset;
  d["engine"] = engine;
  d["t"] = t;
  d["dc_minus_sq"] = dm;
  d["dc_plus_sq"] = dp;
  d["nbar"] = nbar;
  d["u"] = u;
  d["v"] = v;
  d["w"] = w;
  d["error"] = errors;
  return d;
}

}  // namespace

PYBIND11_MODULE(_celdyn, m) {
  m.doc() = "Second-moment dynamics of a coherently pumped correlated emission laser";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<UnknownPreset>(m, "UnknownPreset", validation.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<DegenerateSpectrum>(m, "DegenerateSpectrum", numerical.ptr());
  py::register_exception<NumericalInstability>(m, "NumericalInstability", numerical.ptr());
  py::register_exception<StepTooLarge>(m, "StepTooLarge", numerical.ptr());
  py::register_exception<SingularDrift>(m, "SingularDrift", numerical.ptr());
  py::register_exception<CutoffExceeded>(m, "CutoffExceeded", numerical.ptr());

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init(&make_params), py::arg("A") = 10.0, py::arg("kappa") = 0.5,
           py::arg("Omega") = 0.5, py::arg("gamma") = 1.0, py::arg("Gamma") = 1.0,
           py::arg("theta") = 0.0)
      .def_readwrite("A", &SystemParams::A)
      .def_readwrite("kappa", &SystemParams::kappa)
      .def_readwrite("Omega", &SystemParams::Omega)
      .def_readwrite("gamma", &SystemParams::gamma)
      .def_readwrite("Gamma", &SystemParams::Gamma)
      .def_readwrite("theta", &SystemParams::theta)
      .def("__eq__", [](const SystemParams& a, const SystemParams& b) { return a == b; })
      .def("__repr__", [](const SystemParams& p) {
        return "SystemParams(A=" + format_double(p.A) + ", kappa=" + format_double(p.kappa) +
               ", Omega=" + format_double(p.Omega) + ", gamma=" + format_double(p.gamma) +
               ", Gamma=" + format_double(p.Gamma) + ", theta=" + format_double(p.theta) + ")";
      });

  py::class_<ReducedParams>(m, "ReducedParams")
      .def_readonly("zeta", &ReducedParams::zeta)
      .def_readonly("zeta_p", &ReducedParams::zeta_p)
      .def_readonly("chi", &ReducedParams::chi)
      .def_readonly("B", &ReducedParams::B)
      .def_readonly("eth", &ReducedParams::eth)
      .def_readonly("C", &ReducedParams::C)
      .def_readonly("D", &ReducedParams::D)
      .def_readonly("E", &ReducedParams::E)
      .def_readonly("L", &ReducedParams::L)
      .def_readonly("M", &ReducedParams::M);

  py::class_<DriftDiffusion>(m, "DriftDiffusion")
      .def_readonly("eta_a", &DriftDiffusion::eta_a)
      .def_readonly("eta_b", &DriftDiffusion::eta_b)
      .def_readonly("xi_a", &DriftDiffusion::xi_a)
      .def_readonly("xi_b", &DriftDiffusion::xi_b)
      .def_readonly("d_aa", &DriftDiffusion::d_aa)
      .def_readonly("d_ab", &DriftDiffusion::d_ab)
      .def("trace", &DriftDiffusion::trace)
      .def("determinant", &DriftDiffusion::determinant);

  py::class_<SpectralDecomposition>(m, "SpectralDecomposition")
      .def_readonly("mu_plus", &SpectralDecomposition::mu_plus)
      .def_readonly("mu_minus", &SpectralDecomposition::mu_minus)
      .def_readonly("p", &SpectralDecomposition::p)
      .def_readonly("q_plus", &SpectralDecomposition::q_plus)
      .def_readonly("q_minus", &SpectralDecomposition::q_minus)
      .def_readonly("discriminant", &SpectralDecomposition::discriminant)
      .def_readonly("degenerate", &SpectralDecomposition::degenerate)
      .def_property_readonly("unstable", &SpectralDecomposition::unstable);

  m.def("derive", &derive, py::arg("params"));
  m.def(
      "drift_diffusion",
      [](const SystemParams& p, bool as_printed) {
        return drift_diffusion(p, as_printed ? DriftVariant::as_printed : DriftVariant::corrected);
      },
      py::arg("params"), py::arg("as_printed") = false);
  m.def(
      "spectral",
      [](const SystemParams& p, bool strict) {
        SpectralOptions opts;
        opts.strict = strict;
        return spectral(derive(p), p, opts);
      },
      py::arg("params"), py::arg("strict") = false);

  m.def(
      "second_moments",
      [](const SystemParams& p, py::array_t<double, py::array::c_style | py::array::forcecast> t) {
        const ClosedFormSolution cf(p);
        std::vector<MomentState> states;
        for (double ti : as_grid(t)) states.push_back(cf.moments(ti));
        return moment_array(states);
      },
      py::arg("params"), py::arg("t"),
      "Closed-form (u, v, w) per time as an (n, 3) array.");

  m.def(
      "quadrature_variances",
      [](const SystemParams& p, py::array_t<double, py::array::c_style | py::array::forcecast> t) {
        const ClosedFormSolution cf(p);
        const auto grid = as_grid(t);
        py::array_t<double> minus(grid.size()), plus(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const QuadratureVariances q = quadrature_variances(cf.moments(grid[i]));
          minus.mutable_at(i) = q.dc_minus_sq;
          plus.mutable_at(i) = q.dc_plus_sq;
        }
        return py::make_tuple(minus, plus);
      },
      py::arg("params"), py::arg("t"));

  m.def(
      "mean_photon_pairs",
      [](const SystemParams& p, py::array_t<double, py::array::c_style | py::array::forcecast> t) {
        const ClosedFormSolution cf(p);
        const auto grid = as_grid(t);
        py::array_t<double> out(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
          out.mutable_at(i) = mean_photon_pairs(cf.moments(grid[i]));
        return out;
      },
      py::arg("params"), py::arg("t"));

  m.def(
      "integrate_moments",
      [](const SystemParams& p, py::array_t<double, py::array::c_style | py::array::forcecast> t,
         double dt) {
        const auto grid = as_grid(t);
        MomentTrajectory traj;
        {
          py::gil_scoped_release release;
          traj = integrate_moments(drift_diffusion(p), grid, dt);
        }
        return moment_array(traj.states);
      },
      py::arg("params"), py::arg("t"), py::arg("dt") = 1e-4,
      "RK4 moment trajectory as an (n, 3) array; t must start at 0.");

  m.def(
      "steady_state",
      [](const SystemParams& p) {
        const MomentState s = steady_state(drift_diffusion(p));
        return py::make_tuple(s.u, s.v, s.w);
      },
      py::arg("params"));

  m.def(
      "evolve_fock",
      [](const SystemParams& p, py::array_t<double, py::array::c_style | py::array::forcecast> t,
         double dt, int cutoff, bool throw_on_cutoff) {
        const auto grid = as_grid(t);
        FockOptions opts;
        opts.cutoffs = {cutoff, cutoff};
        opts.throw_on_cutoff = throw_on_cutoff;
        std::vector<FockRecord> series;
        {
          py::gil_scoped_release release;
          series = evolve(p, grid, dt, opts);
        }
        const auto n = static_cast<py::ssize_t>(series.size());
        py::array_t<double> na(n), nb(n), ab(n), trace(n), tail(n);
        for (py::ssize_t i = 0; i < n; ++i) {
          na.mutable_at(i) = series[i].n_a;
          nb.mutable_at(i) = series[i].n_b;
          ab.mutable_at(i) = series[i].ab.real();
          trace.mutable_at(i) = series[i].trace;
          tail.mutable_at(i) = series[i].tail;
        }
        py::dict d;
        d["n_a"] = na;
        d["n_b"] = nb;
        d["ab"] = ab;
        d["trace"] = trace;
        d["tail"] = tail;
        return d;
      },
      py::arg("params"), py::arg("t"), py::arg("dt") = 1e-4, py::arg("cutoff") = 12,
      py::arg("throw_on_cutoff") = true);

  m.def("preset_names", &preset_names);

  m.def(
      "run_preset",
      [](const std::string& name, const std::string& engine) {
        SweepSpec spec = preset(name);
        spec.engine = parse_engine(engine);
        std::vector<CurveRecord> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(spec);
        }
        py::dict d = records_to_columns(rows);
        py::list values;
        for (double v : spec.values) values.append(v);
        d["axis"] = std::string(to_string(spec.axis));
        d["values"] = values;
        return d;
      },
      py::arg("name"), py::arg("engine") = "closed_form",
      "Rows of a figure preset as columns of numpy arrays.");

  m.def(
      "verify",
      [](const std::string& level, bool as_printed, int draws) {
        if (level != "fast" && level != "full")
          throw ValidationError("level", "expected 'fast' or 'full', got '" + level + "'");
        VerifyOptions opts;
        opts.level = level == "full" ? VerifyLevel::full : VerifyLevel::fast;
        opts.drift = as_printed ? DriftVariant::as_printed : DriftVariant::corrected;
        opts.random_draws = draws;
        VerifyReport report;
        {
          py::gil_scoped_release release;
          report = run_verify(opts);
        }
        py::list checks;
        for (const auto& c : report.checks) {
          py::dict d;
          d["name"] = c.name;
          d["passed"] = c.passed;
          d["value"] = c.value;
          d["tolerance"] = c.tolerance;
          d["detail"] = c.detail;
          checks.append(d);
        }
        return checks;
      },
      py::arg("level") = "fast", py::arg("as_printed") = false, py::arg("draws") = 10000);
}
