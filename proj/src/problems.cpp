#include "mrock/problems.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include <Eigen/Dense>

#include "mrock/spectral.hpp"

namespace mrock {

Rhs SplitSystem::full() const {
  return [fast = fast, slow = slow](double t, const Vector& y, Vector& out) {
    slow(t, y, out);
    if (fast) {
      Vector tmp(y.size());
      fast(t, y, tmp);
      out += tmp;
    }
  };
}

namespace {

constexpr double kK1 = 0.04;
constexpr double kK2 = 3e7;
constexpr double kK3 = 1e4;

// The radius at y0 grows by ~10% during the initial layer (y2 relaxes upward
// within t ~ 1e-3), which a 5% margin does not cover.
constexpr double kRobertsonSafety = 1.2;

RadiusFn dense_jacobian_radius(std::function<Eigen::Matrix3d(const Vector&)> jac) {
  return [jac = std::move(jac)](double, const Vector& y) {
    const Eigen::Matrix3d j = jac(y);
    return kRobertsonSafety * power_radius([&](const Vector& x, Vector& out) { out = j * x; }, 3).raw;
  };
}

Eigen::Matrix3d robertson_fast_jacobian(const Vector& y) {
  Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
  j(1, 1) = -kK3 * y[2];
  j(1, 2) = -kK3 * y[1];
  return j;
}

Eigen::Matrix3d robertson_slow_jacobian(const Vector& y) {
  Eigen::Matrix3d j;
  j << -kK1, kK3 * y[2], kK3 * y[1],
       kK1, -2.0 * kK2 * y[1], 0.0,
       0.0, 2.0 * kK2 * y[1], 0.0;
  return j;
}

}  // namespace

void robertson_rhs(double, const Vector& y, Vector& out) {
  out.resize(3);
  out[0] = -kK1 * y[0] + kK3 * y[1] * y[2];
  out[1] = kK1 * y[0] - kK3 * y[1] * y[2] - kK2 * y[1] * y[1];
  out[2] = kK2 * y[1] * y[1];
}

SplitSystem robertson() {
  SplitSystem sys;
  sys.name = "robertson";
  sys.y0 = Vector(3);
  sys.y0 << 1.0, 2e-5, 1e-1;
  sys.fast = [](double, const Vector& y, Vector& out) {
    out.setZero(3);
    out[1] = -kK3 * y[1] * y[2];
  };
  sys.slow = [](double, const Vector& y, Vector& out) {
    out.resize(3);
    out[0] = -kK1 * y[0] + kK3 * y[1] * y[2];
    out[1] = kK1 * y[0] - kK2 * y[1] * y[1];
    out[2] = kK2 * y[1] * y[1];
  };
  sys.rho_fast = dense_jacobian_radius(robertson_fast_jacobian);
  sys.rho_slow = dense_jacobian_radius(robertson_slow_jacobian);
  sys.rho_full = dense_jacobian_radius(
      [](const Vector& y) -> Eigen::Matrix3d { return robertson_fast_jacobian(y) + robertson_slow_jacobian(y); });
  return sys;
}

SplitSystem multirate_test(double lambda, double zeta, double y0) {
  if (lambda > 0.0 || zeta > 0.0) throw std::invalid_argument("multirate_test: lambda and zeta must be <= 0");
  SplitSystem sys;
  sys.name = "multirate_test";
  sys.y0 = Vector::Constant(1, y0);
  sys.fast = [lambda](double, const Vector& y, Vector& out) { out = lambda * y; };
  sys.slow = [zeta](double, const Vector& y, Vector& out) { out = zeta * y; };
  sys.rho_fast = [lambda](double, const Vector&) { return std::abs(lambda); };
  sys.rho_slow = [zeta](double, const Vector&) { return std::abs(zeta); };
  sys.rho_full = [lambda, zeta](double, const Vector&) { return std::abs(lambda + zeta); };
  sys.exact = [lambda, zeta, y0](double t) { return Vector::Constant(1, std::exp((lambda + zeta) * t) * y0); };
  return sys;
}

SplitSystem linear_system(SparseMatrix a_fast, SparseMatrix a_slow, Source source, Vector y0,
                          const LinearRadiusOptions& opts) {
  const Eigen::Index n = y0.size();
  if (a_fast.rows() != n || a_fast.cols() != n || a_slow.rows() != n || a_slow.cols() != n) {
    throw std::invalid_argument("linear_system: operator dimensions do not match the state");
  }
  auto af = std::make_shared<const SparseMatrix>(std::move(a_fast));
  auto as = std::make_shared<const SparseMatrix>(std::move(a_slow));

  auto radius = [&](auto apply) { return power_radius(apply, n, opts.tol, opts.max_iter).radius; };
  const double rf = radius([&](const Vector& x, Vector& out) { out = *af * x; });
  const double rs = radius([&](const Vector& x, Vector& out) { out = *as * x; });
  const double r = radius([&](const Vector& x, Vector& out) { out = *af * x + *as * x; });

  SplitSystem sys;
  sys.name = "linear";
  sys.y0 = std::move(y0);
  sys.fast = [af](double, const Vector& y, Vector& out) { out.noalias() = *af * y; };
  sys.slow = [as, source = std::move(source)](double t, const Vector& y, Vector& out) {
    out.noalias() = *as * y;
    if (source) {
      Vector g(y.size());
      source(t, g);
      out += g;
    }
  };
  sys.rho_fast = [rf](double, const Vector&) { return rf; };
  sys.rho_slow = [rs](double, const Vector&) { return rs; };
  sys.rho_full = [r](double, const Vector&) { return r; };
  return sys;
}

}  // namespace mrock
