#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "celdyn/closed_form.hpp"
#include "celdyn/errors.hpp"
#include "celdyn/fock_oracle.hpp"
#include "celdyn/moment_ode.hpp"
#include "celdyn/verify.hpp"

using namespace celdyn;
using doctest::Approx;

namespace {

// Reference point used throughout: A=10 kappa=0.5 Omega=0.5 gamma=Gamma=1.
const SystemParams kRef{10.0, 0.5, 0.5, 1.0, 1.0, 0.0};

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("spectrum at the reference point") {
  // 50-digit values from tests/oracles/golden_values.py
  const SpectralDecomposition sd = spectral(derive(kRef), kRef);
  CHECK(sd.discriminant == Approx(3.578125));
  CHECK_FALSE(sd.degenerate);
  CHECK(sd.unstable());
  CHECK(close(sd.mu_plus.real(), 3.4420877588731242267, 1e-13));
  CHECK(close(sd.mu_minus.real(), -0.11855834710841834438, 1e-12));
  CHECK(close(sd.p.real(), 1.321637200910179557, 1e-13));
  CHECK(close(sd.q_plus.real(), 0.59473674040958080063, 1e-13));
  CHECK(close(sd.q_minus.real(), -1.2555553408646705791, 1e-13));
  CHECK(sd.mu_plus.imag() == 0.0);
}

TEST_CASE("propagators at the reference point") {
  const Propagators g = propagators(spectral(derive(kRef), kRef), 1.0);
  CHECK(close(g.F_plus.real(), 1.3017879702461727795, 1e-12));
  CHECK(close(g.G_plus.real(), -0.32528375214064356158, 1e-12));
  CHECK(close(g.G_minus.real(), 0.68671014340802529668, 1e-12));
  CHECK(close(g.F_minus.real(), -0.14391759482335416084, 1e-12));

  const Propagators g0 = propagators(spectral(derive(kRef), kRef), 0.0);
  CHECK(g0.F_plus == cplx(1.0));
  CHECK(g0.F_minus == cplx(1.0));
  CHECK(g0.G_plus == cplx(0.0));
  CHECK(g0.G_minus == cplx(0.0));
}

TEST_CASE("moments against the high-precision ODE solution") {
  struct Row {
    double t, u, v, w;
  };
  // mpmath taylor integration of the moment equations, 50 digits
  const Row rows[] = {
      {0.25, 0.41513295616913586357, 0.15261269460423533693, 0.45925777486493778871},
      {0.5, 0.76104274164218598937, 0.3429565439334056636, 0.76560698139388973316},
      {1.0, 1.4027172153499902979, 0.60823317498727669478, 1.1921452575523680988},
      {2.0, 2.8345625445200870967, 1.046672926191133247, 1.9849347124853381662},
  };
  const ClosedFormSolution cf(kRef);
  for (const Row& r : rows) {
    CAPTURE(r.t);
    const MomentState m = cf.moments(r.t);
    CHECK(close(m.u, r.u, 1e-12));
    CHECK(close(m.v, r.v, 1e-12));
    CHECK(close(m.w, r.w, 1e-12));
  }
}

TEST_CASE("vacuum at t = 0 and without gain") {
  const MomentState m0 = second_moments(kRef, 0.0);
  CHECK(m0.u == 0.0);
  CHECK(m0.v == 0.0);
  CHECK(m0.w == 0.0);
  const QuadratureVariances q0 = quadrature_variances(m0);
  CHECK(q0.dc_minus_sq == 1.0);
  CHECK(q0.dc_plus_sq == 1.0);
  CHECK_FALSE(q0.squeezed());

  SystemParams p = kRef;
  p.A = 0.0;
  for (double t : {0.1, 1.0, 10.0, 100.0}) {
    const MomentState m = second_moments(p, t);
    CHECK(m.u == 0.0);
    CHECK(m.v == 0.0);
    CHECK(m.w == 0.0);
  }
}

TEST_CASE("initial slopes equal the diffusion terms") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const SystemParams p = random_params(rng);
    const DriftDiffusion dd = drift_diffusion(p);
    const double h = 1e-6;
    const MomentState m = second_moments(p, h);
    CAPTURE(i);
    CHECK(m.u / h == Approx(dd.d_aa).epsilon(1e-4).scale(1.0));
    CHECK(m.v / h == Approx(0.0).epsilon(1e-4).scale(1.0 + std::abs(dd.d_ab)));
    CHECK(m.w / h == Approx(dd.d_ab).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("eigenvector normalization over random parameters") {
  std::mt19937_64 rng(20240611);
  int complex_cases = 0;
  for (int i = 0; i < 10000; ++i) {
    const SystemParams p = random_params(rng);
    const ReducedParams rp = derive(p);
    const SpectralDecomposition sd = spectral(rp, p);
    if (sd.discriminant < 0.0) ++complex_cases;
    REQUIRE(std::abs(sd.p * sd.p + sd.q_plus * sd.q_minus - 1.0) < 1e-12);

    const DriftDiffusion dd = drift_diffusion(rp, p);
    const double tr_scale = std::abs(dd.eta_a) + std::abs(dd.eta_b) + 1e-300;
    const double det_scale = std::abs(dd.eta_a * dd.eta_b) + std::abs(dd.xi_a * dd.xi_b) + 1e-300;
    REQUIRE(std::abs(sd.mu_plus + sd.mu_minus - dd.trace()) / tr_scale < 1e-12);
    REQUIRE(std::abs(sd.mu_plus * sd.mu_minus - dd.determinant()) / det_scale < 1e-12);
  }
  CHECK(complex_cases > 100);
}

TEST_CASE("complex radicand still gives real moments") {
  // Omega = 0 and gamma < Gamma push the radicand below zero.
  const SystemParams p{3.0, 0.8, 0.0, 0.3, 1.0, 0.0};
  const ClosedFormSolution cf(p);
  REQUIRE(cf.spectrum().discriminant < 0.0);
  CHECK(cf.spectrum().mu_plus.imag() != 0.0);
  CHECK(std::abs(cf.spectrum().mu_plus - std::conj(cf.spectrum().mu_minus)) < 1e-14);

  const std::vector<double> grid = {0.0, 0.5, 1.0, 2.0, 4.0};
  const auto traj = integrate_moments(drift_diffusion(p), grid, 1e-3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const MomentState m = cf.moments(grid[i]);
    CAPTURE(grid[i]);
    CHECK(relative_error(m.u, traj.states[i].u) < 1e-9);
    CHECK(relative_error(m.v, traj.states[i].v) < 1e-9);
    CHECK(relative_error(m.w, traj.states[i].w) < 1e-9);
  }
}

TEST_CASE("degenerate spectrum is perturbed or rejected") {
  // Omega = 0 with gamma = Gamma makes the radicand exactly zero.
  const SystemParams p{1.0, 0.5, 0.0, 1.0, 1.0, 0.0};
  const ClosedFormSolution cf(p);
  CHECK(cf.degenerate());
  CHECK(cf.spectrum().discriminant == 0.0);
  // The shifted radicand is ~1e-8 of its terms, so rounding in the identity
  // grows to about eps / 1e-8.
  CHECK(std::abs(cf.spectrum().p * cf.spectrum().p +
                 cf.spectrum().q_plus * cf.spectrum().q_minus - 1.0) < 1e-7);

  const std::vector<double> grid = {0.0, 0.25, 1.0, 3.0};
  const auto traj = integrate_moments(drift_diffusion(p), grid, 1e-3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const MomentState m = cf.moments(grid[i]);
    CAPTURE(grid[i]);
    CHECK(relative_error(m.u, traj.states[i].u) < 1e-6);
    CHECK(relative_error(m.v, traj.states[i].v) < 1e-6);
    CHECK(relative_error(m.w, traj.states[i].w) < 1e-6);
  }

  SpectralOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(ClosedFormSolution(p, strict), DegenerateSpectrum);
  CHECK_NOTHROW(ClosedFormSolution(kRef, strict));
}

TEST_CASE("instability horizon") {
  const ClosedFormSolution unstable(kRef);
  REQUIRE(unstable.unstable());
  const double horizon = unstable.instability_horizon();
  CHECK(horizon == Approx(std::log(1e15) / (2.0 * 0.11855834710841834438)).epsilon(1e-12));
  CHECK_NOTHROW(unstable.moments(0.99 * horizon));
  CHECK_THROWS_AS(unstable.moments(1.01 * horizon), NumericalInstability);

  const ClosedFormSolution stable({5.0, 0.5, 0.5, 1.0, 1.0, 0.0});
  CHECK_FALSE(stable.unstable());
  CHECK(std::isinf(stable.instability_horizon()));
  CHECK_NOTHROW(stable.moments(1e6));
}

TEST_CASE("stable points relax to the fixed point") {
  const SystemParams p{1.0, 0.5, 0.5, 1.0, 1.0, 0.0};
  const MomentState late = second_moments(p, 50.0);
  const MomentState fixed = steady_state(drift_diffusion(p));
  // Exact rational fixed point for this point.
  CHECK(close(fixed.u, 0.35324675324675325, 1e-14));
  CHECK(close(fixed.v, 0.1316017316017316, 1e-14));
  CHECK(close(fixed.w, 0.36883116883116883, 1e-14));
  CHECK(std::abs(late.u - fixed.u) < 1e-8);
  CHECK(std::abs(late.v - fixed.v) < 1e-8);
  CHECK(std::abs(late.w - fixed.w) < 1e-8);
}

TEST_CASE("uncertainty product holds wherever the master equation is positive") {
  // The bound is only guaranteed when the jump-rate matrix of the underlying
  // master equation is positive semidefinite; elsewhere the linear model is
  // not a physical state and the product can dip below 1.
  std::mt19937_64 rng(3);
  int physical = 0, unphysical_violations = 0;
  for (int i = 0; i < 2000; ++i) {
    const SystemParams p = random_params(rng);
    const auto [g, d, e, f] = Liouvillian::rates(p);
    const bool positive = g - d >= 0.0 && (g - d) * (g + p.kappa + d) >= e * e;
    const ClosedFormSolution cf(p);
    const double t_end = std::min(5.0, cf.instability_horizon() / 2);
    double worst = 0.0;
    for (int k = 0; k <= 20; ++k) {
      const QuadratureVariances q = quadrature_variances(cf.moments(t_end * k / 20.0));
      worst = std::max(worst, 1.0 - q.dc_minus_sq * q.dc_plus_sq);
    }
    if (positive) {
      CAPTURE(i);
      REQUIRE(worst <= 1e-9);
      ++physical;
    } else if (worst > 1e-9) {
      ++unphysical_violations;
    }
  }
  CHECK(physical > 1500);
  CHECK(unphysical_violations > 0);
}

TEST_CASE("photon pairs and variances from moments") {
  const MomentState m{1.0, 2.0, 0.5, 0.25};  // t, u, v, w
  const QuadratureVariances q = quadrature_variances(m);
  CHECK(q.dc_minus_sq == 3.0);
  CHECK(q.dc_plus_sq == 4.0);
  CHECK(mean_photon_pairs(m) == 1.25);
}
