#include <doctest.h>

#include <cmath>
#include <vector>

#include "celdyn/closed_form.hpp"
#include "celdyn/errors.hpp"
#include "celdyn/moment_ode.hpp"
#include "celdyn/verify.hpp"

using namespace celdyn;
using doctest::Approx;

namespace {

const SystemParams kRef{10.0, 0.5, 0.5, 1.0, 1.0, 0.0};

double max_error_at(const SystemParams& p, double t_end, double dt) {
  const std::vector<double> grid = {0.0, t_end};
  const auto traj = integrate_moments(drift_diffusion(p), grid, dt);
  const MomentState exact = second_moments(p, t_end);
  const MomentState& m = traj.states.back();
  return std::max({std::abs(m.u - exact.u), std::abs(m.v - exact.v), std::abs(m.w - exact.w)});
}

}  // namespace

TEST_CASE("matches the high-precision solution") {
  const std::vector<double> grid = {0.0, 0.25, 0.5, 1.0, 2.0};
  const auto traj = integrate_moments(drift_diffusion(kRef), grid, 1e-4);
  REQUIRE(traj.states.size() == grid.size());
  CHECK(traj.order == 4);
  CHECK(traj.max_step <= 1e-4);
  const double u[] = {0.0, 0.41513295616913586357, 0.76104274164218598937,
                      1.4027172153499902979, 2.8345625445200870967};
  const double v[] = {0.0, 0.15261269460423533693, 0.3429565439334056636,
                      0.60823317498727669478, 1.046672926191133247};
  const double w[] = {0.0, 0.45925777486493778871, 0.76560698139388973316,
                      1.1921452575523680988, 1.9849347124853381662};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CAPTURE(grid[i]);
    CHECK(traj.times[i] == grid[i]);
    CHECK(traj.states[i].t == grid[i]);
    CHECK(std::abs(traj.states[i].u - u[i]) < 1e-10);
    CHECK(std::abs(traj.states[i].v - v[i]) < 1e-10);
    CHECK(std::abs(traj.states[i].w - w[i]) < 1e-10);
  }
}

TEST_CASE("fourth-order convergence") {
  const double e1 = max_error_at(kRef, 1.0, 1.0 / 64);
  const double e2 = max_error_at(kRef, 1.0, 1.0 / 128);
  const double e3 = max_error_at(kRef, 1.0, 1.0 / 256);
  const double slope = std::log2(e1 / e3) / 2.0;
  CHECK(slope > 3.7);
  CHECK(slope < 4.3);
  CHECK(e2 < e1);
  CHECK(e3 < e2);
}

TEST_CASE("uneven grids are hit exactly") {
  const std::vector<double> grid = {0.0, 0.013, 0.5, 0.5001, 3.0};
  const auto traj = integrate_moments(drift_diffusion(kRef), grid, 1e-3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const MomentState exact = second_moments(kRef, grid[i]);
    CAPTURE(grid[i]);
    CHECK(traj.times[i] == grid[i]);
    CHECK(relative_error(traj.states[i].u, exact.u) < 1e-9);
    CHECK(relative_error(traj.states[i].w, exact.w) < 1e-9);
  }
  CHECK(traj.max_step <= 1e-3);
}

TEST_CASE("step guard") {
  const DriftDiffusion dd = drift_diffusion(kRef);
  const double limit = kMaxStepRate / dd.max_rate();
  const std::vector<double> grid = {0.0, 1.0};
  CHECK_NOTHROW(check_step(dd, 0.99 * limit));
  CHECK_THROWS_AS(check_step(dd, 1.01 * limit), StepTooLarge);
  CHECK_THROWS_AS(integrate_moments(dd, grid, 1.01 * limit), StepTooLarge);
  CHECK_THROWS_AS(integrate_moments(dd, grid, 0.0), ValidationError);
  CHECK_THROWS_AS(integrate_moments(dd, grid, -1e-3), ValidationError);
}

TEST_CASE("time grid validation") {
  const DriftDiffusion dd = drift_diffusion(kRef);
  CHECK_THROWS_AS(integrate_moments(dd, std::vector<double>{}, 1e-3), ValidationError);
  CHECK_THROWS_AS(integrate_moments(dd, std::vector<double>{0.1, 0.2}, 1e-3), ValidationError);
  CHECK_THROWS_AS(integrate_moments(dd, std::vector<double>{0.0, 0.2, 0.2}, 1e-3),
                  ValidationError);
  CHECK_THROWS_AS(integrate_moments(dd, std::vector<double>{0.0, 0.3, 0.2}, 1e-3),
                  ValidationError);
  CHECK_NOTHROW(integrate_moments(dd, std::vector<double>{0.0}, 1e-3));
}

TEST_CASE("steady state below threshold") {
  const SystemParams p{1.0, 0.5, 0.5, 1.0, 1.0, 0.0};
  const MomentState s = steady_state(drift_diffusion(p));
  CHECK(std::isinf(s.t));
  CHECK(s.u == Approx(0.35324675324675325).epsilon(1e-14));
  CHECK(s.v == Approx(0.1316017316017316).epsilon(1e-14));
  CHECK(s.w == Approx(0.36883116883116883).epsilon(1e-14));

  const std::vector<double> grid = {0.0, 50.0};
  const auto traj = integrate_moments(drift_diffusion(p), grid, 1e-3);
  CHECK(std::abs(traj.states.back().u - s.u) < 1e-8);
  CHECK(std::abs(traj.states.back().v - s.v) < 1e-8);
  CHECK(std::abs(traj.states.back().w - s.w) < 1e-8);
}

TEST_CASE("steady state at and above threshold") {
  // Gain where the slow eigenvalue crosses zero, located by bisection in
  // tests/oracles/golden_values.py
  SystemParams p = kRef;
  p.A = 6.7831864876053889818;
  CHECK_THROWS_AS(steady_state(drift_diffusion(p)), SingularDrift);
  p.A = 10.0;
  CHECK_THROWS_AS(steady_state(drift_diffusion(p)), NumericalInstability);
  p.A = 6.0;
  CHECK_NOTHROW(steady_state(drift_diffusion(p)));
}
