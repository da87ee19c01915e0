#include <doctest.h>

#include <cmath>

#include "mrock/rkc.hpp"

using namespace mrock;
using doctest::Approx;

TEST_CASE("stage count") {
  CHECK(rkc_stage_count(193.0, 0.05) == 10);
  CHECK(rkc_stage_count(200.0, 0.0) == 11);
  CHECK(rkc_stage_count(0.0, 0.05) == 1);
  CHECK_THROWS_AS(rkc_stage_count(-1.0, 0.05), std::invalid_argument);
  for (double tr : {0.5, 7.0, 99.0, 1e4, 3.3e6}) {
    const int m = rkc_stage_count(tr, 0.05);
    const double beta = 2.0 - 4.0 * 0.05 / 3.0;
    CHECK(tr <= beta * m * m);
    CHECK(tr >= beta * (m - 1) * (m - 1));
  }
}

TEST_CASE("stage cap") {
  CHECK_NOTHROW(check_stage_cap(5, 5, "rkc"));
  CHECK_THROWS_AS(check_stage_cap(6, 5, "rkc"), StageLimitError);
}

TEST_CASE("one step on a linear scalar equals the stability polynomial") {
  for (int m : {1, 2, 7, 30}) {
    const auto tab = rkc_tableau(m, 0.05);
    for (double z : {-0.3, -5.0, -tab.ell * 0.9}) {
      int calls = 0;
      auto f = [&](double, const Vector& y, Vector& out) {
        ++calls;
        out = z * y;
      };
      const Vector y = Vector::Constant(1, 2.0);
      const Vector y1 = rkc_step(f, 0.0, y, 1.0, tab);
      CHECK(y1[0] == Approx(2.0 * rkc_stability(tab, z)).epsilon(1e-11));
      CHECK(calls == m);
    }
  }
}

TEST_CASE("stage times are consistent") {
  // y' = 1 integrates exactly; for y' = t the tau^2 weight is P''(0)/2.
  const auto tab = rkc_tableau(9, 0.05);
  auto one = [](double, const Vector&, Vector& out) { out = Vector::Ones(1); };
  CHECK(rkc_step(one, 0.0, Vector::Zero(1), 0.7, tab)[0] == Approx(0.7).epsilon(1e-13));
  auto lin = [](double t, const Vector&, Vector& out) { out = Vector::Constant(1, t); };
  const double tau = 1e-3;
  CHECK(rkc_step(lin, 1.0, Vector::Zero(1), tau, tab)[0] == Approx(tau * (1 + tau * tab.alpha_m / 2)).epsilon(1e-12));
}

TEST_CASE("first-order convergence") {
  auto f = [](double t, const Vector& y, Vector& out) { out = Vector::Constant(1, -y[0] + std::cos(t)); };
  auto exact = [](double t) { return 0.5 * (std::cos(t) + std::sin(t)) + 0.5 * std::exp(-t); };
  double prev = 0;
  for (int n : {20, 40, 80}) {
    const double tau = 1.0 / n;
    const auto tab = rkc_tableau(4, 0.05);
    Vector y = Vector::Ones(1);
    for (int k = 0; k < n; ++k) y = rkc_step(f, k * tau, y, tau, tab);
    const double err = std::abs(y[0] - exact(1.0));
    if (prev > 0) CHECK(std::log2(prev / err) == Approx(1.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("overflow is reported") {
  auto f = [](double, const Vector& y, Vector& out) { out = 1e300 * y.cwiseAbs2(); };
  CHECK_THROWS_AS(rkc_step(f, 0.0, Vector::Constant(1, 1e10), 1.0, rkc_tableau(3, 0.05)), OverflowError);
}
