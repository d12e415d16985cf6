#pragma once

#include <utility>

namespace celdyn {

/// One classical 4th-order Runge-Kutta step for an autonomous system
/// dy/dt = f(y). `State` needs vector-space arithmetic (Eigen types work).
template <typename State, typename Rhs>
void rk4_step(State& y, double h, Rhs&& f) {
  const State k1 = f(y);
  const State k2 = f(State(y + (0.5 * h) * k1));
  const State k3 = f(State(y + (0.5 * h) * k2));
  const State k4 = f(State(y + h * k3));
  y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace celdyn
