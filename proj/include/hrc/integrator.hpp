#pragma once

#include <sstream>

#include <Eigen/Core>

#include "hrc/errors.hpp"

namespace hrc {

/// One classical fourth-order Runge-Kutta step of ydot = f(t, y).
/// A negative h integrates backward in time. Throws NumericalError if the
/// result contains NaN or Inf.
template <typename Vector, typename Derivative>
Vector rk4_step(Derivative&& f, double t, const Vector& y, double h) {
  const Vector k1 = f(t, y);
  const Vector k2 = f(t + 0.5 * h, Vector(y + (0.5 * h) * k1));
  const Vector k3 = f(t + 0.5 * h, Vector(y + (0.5 * h) * k2));
  const Vector k4 = f(t + h, Vector(y + h * k3));
  Vector next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite state after RK4 step from t = " << t << " with h = " << h;
    throw NumericalError(msg.str());
  }
  return next;
}

}  // namespace hrc
