#include "celdyn/moment_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "celdyn/errors.hpp"
#include "celdyn/rk4.hpp"

namespace celdyn {

namespace {

struct MomentSystem {
  Eigen::Matrix3d jacobian;
  Eigen::Vector3d source;

  explicit MomentSystem(const DriftDiffusion& dd) {
    jacobian << -2.0 * dd.eta_a, 0.0, 2.0 * dd.xi_a,
                0.0, -2.0 * dd.eta_b, 2.0 * dd.xi_b,
                dd.xi_b, dd.xi_a, -(dd.eta_a + dd.eta_b);
    source << dd.d_aa, 0.0, dd.d_ab;
  }

  Eigen::Vector3d operator()(const Eigen::Vector3d& y) const { return jacobian * y + source; }
};

}  // namespace

void check_step(const DriftDiffusion& dd, double dt) {
  if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
  if (dt * dd.max_rate() > kMaxStepRate) {
    std::ostringstream msg;
    msg << "step " << dt << " too large: dt*max(|eta|,|xi|) = " << dt * dd.max_rate()
        << " > " << kMaxStepRate;
    throw StepTooLarge(msg.str());
  }
}

void check_time_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw ValidationError("t_grid", "must not be empty");
  if (t_grid.front() != 0.0) throw ValidationError("t_grid", "must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1]))
      throw ValidationError("t_grid", "must be strictly increasing");
  }
}

MomentTrajectory integrate_moments(const DriftDiffusion& dd, std::span<const double> t_grid,
                                   double dt) {
  check_time_grid(t_grid);
  check_step(dd, dt);

  const MomentSystem rhs(dd);
  MomentTrajectory traj;
  traj.step = dt;
  traj.times.assign(t_grid.begin(), t_grid.end());
  traj.states.reserve(t_grid.size());
  traj.states.push_back(MomentState{});

  Eigen::Vector3d y = Eigen::Vector3d::Zero();
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double span = t_grid[i] - t_grid[i - 1];
    const auto n = static_cast<long>(std::ceil(span / dt * (1.0 - 1e-12)));
    const double h = span / static_cast<double>(std::max(n, 1L));
    traj.max_step = std::max(traj.max_step, h);
    for (long k = 0; k < n; ++k) rk4_step(y, h, rhs);
    traj.states.push_back({t_grid[i], y[0], y[1], y[2]});
  }
  return traj;
}

MomentState steady_state(const DriftDiffusion& dd) {
  const MomentSystem sys(dd);

  // The moment Jacobian has eigenvalues -2 mu+, -2 mu-, -(mu+ + mu-), so its
  // determinant vanishes exactly at threshold.
  const double det = sys.jacobian.determinant();
  const double scale = std::pow(sys.jacobian.cwiseAbs().maxCoeff(), 3);
  if (scale == 0.0 || std::abs(det) <= 1e-12 * scale) {
    std::ostringstream msg;
    msg << "moment drift is singular (det=" << det << "); the system is at threshold";
    throw SingularDrift(msg.str());
  }

  const double half_trace = 0.5 * dd.trace();
  const double radicand = half_trace * half_trace - dd.determinant();
  const double slowest =
      radicand >= 0.0 ? half_trace - std::sqrt(radicand) : half_trace;
  if (slowest < 0.0) {
    std::ostringstream msg;
    msg << "no physical steady state above threshold (slowest decay rate " << slowest << ")";
    throw NumericalInstability(msg.str());
  }

  const Eigen::Vector3d x = sys.jacobian.fullPivLu().solve(-sys.source);
  return {std::numeric_limits<double>::infinity(), x[0], x[1], x[2]};
}

}  // namespace celdyn
