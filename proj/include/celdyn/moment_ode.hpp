#pragma once

#include <span>
#include <vector>

#include "celdyn/closed_form.hpp"
#include "celdyn/params.hpp"

namespace celdyn {

/// Guard shared by the fixed-step integrators: dt * max(|eta|, |xi|) must not
/// exceed this.
inline constexpr double kMaxStepRate = 0.1;

struct MomentTrajectory {
  std::vector<double> times;
  std::vector<MomentState> states;
  double step = 0.0;      ///< requested step
  double max_step = 0.0;  ///< largest step actually taken
  int order = 4;
};

/// Integrates
///
///   du/dt = -2 eta_a u + 2 xi_a w + d_aa
///   dv/dt = -2 eta_b v + 2 xi_b w
///   dw/dt = -(eta_a + eta_b) w + xi_b u + xi_a v + d_ab
///
/// from the vacuum with classical RK4. Each grid interval is split into
/// ceil(interval / dt) equal steps, so every grid time is hit exactly.
/// `t_grid` must start at 0 and be strictly increasing.
MomentTrajectory integrate_moments(const DriftDiffusion& dd, std::span<const double> t_grid,
                                   double dt);

/// Fixed point of the moment equations. Throws SingularDrift at threshold and
/// NumericalInstability above it.
MomentState steady_state(const DriftDiffusion& dd);

/// Throws StepTooLarge when dt * dd.max_rate() > kMaxStepRate.
void check_step(const DriftDiffusion& dd, double dt);

void check_time_grid(std::span<const double> t_grid);

}  // namespace celdyn
