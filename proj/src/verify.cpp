#include "celdyn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "celdyn/closed_form.hpp"
#include "celdyn/errors.hpp"
#include "celdyn/fock_oracle.hpp"
#include "celdyn/moment_ode.hpp"
#include "celdyn/sweep_io.hpp"

namespace celdyn {

namespace {

CheckResult make(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value < tol, value, tol, std::move(detail)};
}

CheckResult identity_check(const VerifyOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  double worst = 0.0;
  int complex_cases = 0;
  for (int i = 0; i < opts.random_draws; ++i) {
    const SystemParams p = random_params(rng);
    const SpectralDecomposition sd = spectral(derive(p), p);
    if (sd.discriminant < 0.0) ++complex_cases;
    worst = std::max(worst, std::abs(sd.p * sd.p + sd.q_plus * sd.q_minus - 1.0));
  }
  return make("identity_p2_plus_qq", worst, 1e-12,
              std::to_string(opts.random_draws) + " draws, " + std::to_string(complex_cases) +
                  " with complex radicand");
}

CheckResult trace_det_check(const VerifyOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  double worst = 0.0;
  for (int i = 0; i < opts.random_draws; ++i) {
    const SystemParams p = random_params(rng);
    const ReducedParams rp = derive(p);
    const SpectralDecomposition sd = spectral(rp, p);
    const DriftDiffusion dd = drift_diffusion(rp, p, opts.drift);
    const cplx sum = sd.mu_plus + sd.mu_minus;
    const cplx prod = sd.mu_plus * sd.mu_minus;
    const double tr_scale = std::max(std::abs(dd.eta_a) + std::abs(dd.eta_b), 1e-300);
    const double det_scale =
        std::max(std::abs(dd.eta_a * dd.eta_b) + std::abs(dd.xi_a * dd.xi_b), 1e-300);
    worst = std::max(worst, std::abs(sum - dd.trace()) / tr_scale);
    worst = std::max(worst, std::abs(prod - dd.determinant()) / det_scale);
  }
  return make("spectral_trace_determinant", worst, 1e-12,
              std::string("drift variant ") + std::string(to_string(opts.drift)));
}

CheckResult cross_ode_check(const VerifyOptions& opts) {
  double worst = 0.0;
  int stable_points = 0;
  const std::vector<double> grid = default_time_grid();
  for (const auto& name : preset_names()) {
    const SweepSpec spec = preset(name);
    for (double value : spec.values) {
      const SystemParams p = point_params(spec, value);
      const ClosedFormSolution cf(p);
      if (cf.unstable()) continue;
      ++stable_points;
      const auto traj = integrate_moments(drift_diffusion(p, opts.drift), grid, opts.ode_dt);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const MomentState m = cf.moments(grid[i]);
        const MomentState& o = traj.states[i];
        worst = std::max({worst, relative_error(m.u, o.u), relative_error(m.v, o.v),
                          relative_error(m.w, o.w)});
      }
    }
  }
  return make("closed_form_vs_moment_ode", worst, 1e-6,
              std::to_string(stable_points) + " stable preset points, 512 times on [0,5]");
}

CheckResult heisenberg_check() {
  double worst = 0.0;  // largest violation of dc+ dc- >= 1
  const std::vector<double> grid = default_time_grid();
  for (const auto& name : preset_names()) {
    const SweepSpec spec = preset(name);
    for (double value : spec.values) {
      const ClosedFormSolution cf(point_params(spec, value));
      if (cf.unstable()) continue;
      for (double t : grid) {
        const QuadratureVariances q = quadrature_variances(cf.moments(t));
        worst = std::max(worst, 1.0 - q.dc_plus_sq * q.dc_minus_sq);
      }
    }
  }
  return make("heisenberg_bound", worst, 1e-9, "max(1 - dc+^2 dc-^2) on stable presets");
}

CheckResult vacuum_check() {
  double worst = 0.0;
  for (const auto& name : preset_names()) {
    const SweepSpec spec = preset(name);
    for (double value : spec.values) {
      SystemParams p = point_params(spec, value);
      const QuadratureVariances q0 = quadrature_variances(second_moments(p, 0.0));
      worst = std::max({worst, std::abs(q0.dc_minus_sq - 1.0), std::abs(q0.dc_plus_sq - 1.0)});
      p.A = 0.0;
      for (double t : {0.5, 1.0, 3.0, 5.0}) {
        const MomentState m = second_moments(p, t);
        worst = std::max({worst, std::abs(m.u), std::abs(m.v), std::abs(m.w)});
      }
    }
  }
  // Exact equality is required, so any nonzero deviation fails.
  return {"vacuum_limits", worst == 0.0, worst, 0.0, "t=0 and A=0 give exact vacuum values"};
}

std::vector<CheckResult> fock_checks(const VerifyOptions& opts) {
  const SystemParams p{2.0, 0.5, 0.5, 1.0, 1.0, 0.0};
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);

  FockOptions fo;
  fo.cutoffs = {opts.fock_cutoff, opts.fock_cutoff};
  fo.throw_on_cutoff = false;
  const auto series = evolve(p, grid, opts.fock_dt, fo);
  const ClosedFormSolution cf(p);

  double delta = 0.0;
  double trace_drift = 0.0;
  double tail = 0.0;
  for (const auto& r : series) {
    const MomentState m = cf.moments(r.t);
    delta = std::max({delta, std::abs(r.n_a - m.u), std::abs(r.n_b - m.v),
                      std::abs(r.ab.real() - m.w)});
    trace_drift = std::max(trace_drift, std::abs(r.trace - 1.0));
    tail = std::max(tail, r.tail);
  }
  const std::string where = "A=2 kappa=0.5 Omega=0.5 gamma=Gamma=1 theta=0, cutoff " +
                            std::to_string(opts.fock_cutoff) + ", t<=1";
  return {make("closed_form_vs_fock", delta, 1e-4, where),
          make("fock_trace_drift", trace_drift, 1e-6, where),
          make("fock_tail_occupancy", tail, 1e-6, where)};
}

}  // namespace

SystemParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SystemParams p;
  p.A = 20.0 * unit(rng);
  p.kappa = 2.0 * unit(rng);
  p.Omega = unit(rng) < 0.3 ? 0.3 * unit(rng) : 20.0 * unit(rng);
  p.gamma = 0.1 + 2.9 * unit(rng);
  p.Gamma = 0.1 + 2.9 * unit(rng);
  p.theta = unit(rng) < 0.3 ? 0.0 : 3.0 * unit(rng);
  return p;
}

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void VerifyReport::print(std::ostream& os) const {
  int failed = 0;
  for (const auto& c : checks) {
    if (!c.passed) ++failed;
    os << "check=" << c.name << " status=" << (c.passed ? "PASS" : "FAIL")
       << " value=" << format_double(c.value) << " tolerance=" << format_double(c.tolerance);
    if (!c.detail.empty()) os << " detail=\"" << c.detail << '"';
    os << '\n';
  }
  os << "summary checks=" << checks.size() << " passed=" << checks.size() - failed
     << " failed=" << failed << " status=" << (failed ? "FAIL" : "PASS") << '\n';
}

VerifyReport run_verify(const VerifyOptions& opts) {
  VerifyReport report;
  report.checks.push_back(identity_check(opts));
  report.checks.push_back(trace_det_check(opts));
  report.checks.push_back(cross_ode_check(opts));
  report.checks.push_back(heisenberg_check());
  report.checks.push_back(vacuum_check());
  if (opts.level == VerifyLevel::full) {
    for (auto& c : fock_checks(opts)) report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace celdyn
