#pragma once

#include <functional>

#include "mrock/types.hpp"

namespace mrock {

/// out = A x for some linear operator A.
using LinearAction = std::function<void(const Vector& x, Vector& out)>;

struct RadiusEstimate {
  double radius = 0.0;  // includes the safety inflation
  double raw = 0.0;     // before inflation
  int iterations = 0;
  bool converged = false;
};

inline constexpr double kRadiusSafety = 1.05;

/// Power iteration for the dominant eigenvalue magnitude of `op`.
///
/// Start vector is all ones plus a unit bump on the first coordinate, so the
/// result is reproducible. Stops when successive norm ratios agree to `tol`
/// (relative); otherwise returns the last iterate with converged = false.
RadiusEstimate power_radius(const LinearAction& op, Eigen::Index n, double tol = 0.01, int max_iter = 50);

/// Power iteration on the directional-derivative action of a nonlinear rhs,
/// J v ~ (f(t, y + h v) - f(t, y)) / h.
RadiusEstimate fd_jacobian_radius(const Rhs& f, double t, const Vector& y, double tol = 0.01,
                                  int max_iter = 50);

}  // namespace mrock
