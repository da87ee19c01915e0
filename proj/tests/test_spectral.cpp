#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "mrock/problems.hpp"
#include "mrock/spectral.hpp"

using namespace mrock;
using doctest::Approx;

namespace {

LinearAction dense(const Eigen::MatrixXd& a) {
  return [a](const Vector& x, Vector& out) { out = a * x; };
}

}  // namespace

TEST_CASE("identity") {
  const auto r = power_radius(dense(Eigen::MatrixXd::Identity(4, 4)), 4);
  CHECK(r.radius == Approx(1.05).epsilon(1e-12));
  CHECK(r.raw == Approx(1.0).epsilon(1e-12));
  CHECK(r.converged);
}

TEST_CASE("diagonal") {
  const Eigen::MatrixXd a = Eigen::Vector3d(-1.0, -10.0, -100.0).asDiagonal();
  const auto r = power_radius(dense(a), 3);
  CHECK(r.radius == Approx(105.0).epsilon(0.01));
  CHECK(r.converged);
}

TEST_CASE("symmetric matrix against a dense eigensolver") {
  Eigen::MatrixXd b(5, 5);
  b << 4, 1, 0, 2, 0,
       1, -7, 1, 0, 1,
       0, 1, 3, 1, 0,
       2, 0, 1, -2, 1,
       0, 1, 0, 1, 6;
  const double exact = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b).eigenvalues().cwiseAbs().maxCoeff();
  const auto r = power_radius(dense(b), 5, 1e-10, 5000);
  CHECK(r.converged);
  CHECK(r.radius / kRadiusSafety == Approx(exact).epsilon(1e-4));
}

TEST_CASE("zero operator and empty dimension") {
  const auto r = power_radius([](const Vector& x, Vector& out) { out.setZero(x.size()); }, 3);
  CHECK(r.radius == 0.0);
  CHECK(r.converged);
  CHECK(power_radius(dense(Eigen::MatrixXd(0, 0)), 0).radius == 0.0);
}

TEST_CASE("non-convergence is reported") {
  const Eigen::MatrixXd a = Eigen::Vector2d(1.0, 0.999).asDiagonal();
  const auto r = power_radius(dense(a), 2, 1e-15, 3);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.raw > 0.99);
}

TEST_CASE("finite-difference Jacobian radius") {
  // f(y) = A y + y^2/2 elementwise: J = A + diag(y)
  const Eigen::Matrix3d a = Eigen::Vector3d(-3.0, -30.0, -300.0).asDiagonal();
  const Rhs f = [&](double, const Vector& y, Vector& out) { out = a * y + 0.5 * y.cwiseAbs2(); };
  Vector y(3);
  y << 1.0, 2.0, 4.0;
  const auto r = fd_jacobian_radius(f, 0.0, y, 1e-8, 500);
  CHECK(r.raw == Approx(296.0).epsilon(1e-5));

  const auto sys = robertson();
  const auto rf = fd_jacobian_radius(sys.fast, 0.0, sys.y0, 1e-6, 500);
  CHECK(rf.raw == Approx(1e4 * sys.y0[2]).epsilon(1e-4));
}
