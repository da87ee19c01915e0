#include "mrock/spectral.hpp"

#include <cmath>
#include <limits>

namespace mrock {

RadiusEstimate power_radius(const LinearAction& op, Eigen::Index n, double tol, int max_iter) {
  RadiusEstimate est;
  if (n < 1) return est;
  Vector x = Vector::Ones(n);
  x[0] += 1.0;
  x.normalize();
  Vector ax(n);
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= max_iter; ++it) {
    op(x, ax);
    const double nrm = ax.norm();
    est.iterations = it;
    est.raw = nrm;
    if (nrm == 0.0) {
      est.converged = true;
      break;
    }
    if (std::isfinite(prev) && std::abs(nrm - prev) <= tol * nrm) {
      est.converged = true;
      break;
    }
    prev = nrm;
    x = ax / nrm;
  }
  est.radius = kRadiusSafety * est.raw;
  return est;
}

RadiusEstimate fd_jacobian_radius(const Rhs& f, double t, const Vector& y, double tol, int max_iter) {
  Vector fy(y.size());
  f(t, y, fy);
  const double ynorm = y.norm();
  const double h = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + ynorm);
  Vector yp(y.size());
  return power_radius(
      [&](const Vector& v, Vector& out) {
        const double vn = v.norm();
        if (vn == 0.0) {
          out.setZero(v.size());
          return;
        }
        yp = y + (h / vn) * v;
        out.resize(v.size());
        f(t, yp, out);
        out = (out - fy) * (vn / h);
      },
      y.size(), tol, max_iter);
}

}  // namespace mrock
