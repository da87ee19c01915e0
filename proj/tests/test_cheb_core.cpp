#include <doctest.h>

#include <cmath>

#include "mrock/cheb_core.hpp"

using namespace mrock;
using doctest::Approx;

TEST_CASE("chebyshev recurrence matches cos(m acos x)") {
  for (int m = 0; m <= 30; ++m) {
    for (double x : {-1.0, -0.7, 0.0, 0.3, 0.99}) {
      CHECK(cheb_T(m, x) == Approx(std::cos(m * std::acos(x))).epsilon(1e-12));
    }
  }
}

TEST_CASE("chebyshev derivatives against finite differences") {
  const double h = 1e-5;
  for (int m : {1, 2, 5, 12}) {
    const double x = 0.37;
    const auto d = cheb_T_derivs(m, x);
    CHECK(d.value == Approx(cheb_T(m, x)));
    CHECK(d.d1 == Approx((cheb_T(m, x + h) - cheb_T(m, x - h)) / (2 * h)).epsilon(1e-7));
    CHECK(d.d2 == Approx((cheb_T(m, x + h) - 2 * cheb_T(m, x) + cheb_T(m, x - h)) / (h * h)).epsilon(1e-4));
  }
}

TEST_CASE("damped point evaluation agrees with the recurrence") {
  for (int m : {2, 3, 10, 40, 100}) {
    for (double eps : {0.0, 0.05, 0.1, 2.0}) {
      const double w0 = 1.0 + eps / (double(m) * m);
      const auto a = cheb_at_damped_point(m, eps);
      const auto b = cheb_T_derivs<long double>(m, (long double)w0);
      CHECK(a.value == Approx(double(b.value)).epsilon(1e-11));
      CHECK(a.d1 == Approx(double(b.d1)).epsilon(1e-11));
      CHECK(a.d2 == Approx(double(b.d2)).epsilon(1e-8));
    }
  }
}

TEST_CASE("rkc tableau against high-precision values") {
  struct Row {
    int m;
    double eps, omega1, alpha, ell;
  };
  const Row rows[] = {
      {10, 0.05, 0.010332826450007013, 0.33865271818489079, 193.65466067598975},
      {100, 0.05, 0.00010331149010029739, 0.34206246581289221, 19359.027713745489},
      {2, 0.05, 0.25933641975308642, 0.25613473555860387, 7.8083903600119012},
      {50, 0.1, 0.00042632326188227738, 0.35047416854299769, 4691.463447641502},
  };
  for (const auto& r : rows) {
    const auto tab = rkc_tableau(r.m, r.eps);
    CHECK(tab.omega1 == Approx(r.omega1).epsilon(1e-13));
    CHECK(tab.alpha_m == Approx(r.alpha).epsilon(1e-12));
    CHECK(tab.ell == Approx(r.ell).epsilon(1e-13));
  }
  CHECK(alpha_limit(0.05) == Approx(0.34209691009582609).epsilon(1e-14));
}

TEST_CASE("two-stage undamped tableau") {
  const auto tab = rkc_tableau(2, 0.0);
  CHECK(tab.omega1 == Approx(0.25));
  CHECK(tab.mu[2] == Approx(0.5));
  CHECK(tab.nu[2] == Approx(2.0));
  CHECK(tab.kappa[2] == Approx(-1.0));
  CHECK(tab.ell == Approx(8.0));
  for (double z : {-7.0, -3.0, -0.5, 0.0, 1.0}) {
    CHECK(rkc_stability(tab, z) == Approx(1 + z + z * z / 8));
  }
  CHECK(rkc_phi(tab, -4.0) == Approx(0.5));
  CHECK(rkc_phi(tab, 1e-9) == Approx(1 + 1.25e-10).epsilon(1e-15));
}

TEST_CASE("stability polynomial value") {
  CHECK(rkc_stability(rkc_tableau(10, 0.05), -10.0) == Approx(-0.1306438207797394).epsilon(1e-12));
}

TEST_CASE("stability polynomial properties") {
  for (int m = 1; m <= 60; ++m) {
    for (double eps : {0.0, 0.05}) {
      const auto tab = rkc_tableau(m, eps);
      CHECK(rkc_stability(tab, 0.0) == Approx(1.0).epsilon(1e-11));
      const double h = 1e-6;
      CHECK((rkc_stability(tab, h) - rkc_stability(tab, -h)) / (2 * h) == Approx(1.0).epsilon(1e-6));
      // bounded by 1 on the guaranteed interval
      const double L = tab.nominal_length();
      double worst = 0;
      for (int k = 0; k <= 2000; ++k) worst = std::max(worst, std::abs(rkc_stability(tab, -L * k / 2000.0)));
      CHECK(worst <= 1.0 + 1e-12);
      CHECK(tab.ell >= L * (1 - 1e-12));
      CHECK(tab.b[0] == Approx(1.0));
    }
  }
}

TEST_CASE("phi is continuous across the Taylor switch") {
  for (int m : {2, 5, 50}) {
    const auto tab = rkc_tableau(m, 0.05);
    const double z = -kPhiTaylorSwitch;
    const double inside = rkc_phi(tab, z);
    const double outside = rkc_phi(tab, std::nextafter(z, -1.0));
    CHECK(inside == Approx(outside).epsilon(1e-5));  // limited by cancellation in (P - 1)/z
    CHECK(rkc_phi(tab, 0.0) == 1.0);
  }
}

TEST_CASE("alpha is increasing in m and tends to the limit") {
  for (double eps : {0.05, 0.1, 1.0}) {
    double prev = 0;
    for (int m = 1; m <= 400; ++m) {
      const double a = alpha_m(m, eps);
      CHECK(a >= prev - 1e-15);
      CHECK(a < alpha_limit(eps) + 1e-12);
      prev = a;
    }
    CHECK(alpha_m(100000, eps) == Approx(alpha_limit(eps)).epsilon(1e-8));
  }
  CHECK(alpha_m(7, 0.0) == Approx(48.0 / 147.0));
}

TEST_CASE("long double cross-check of the tableau") {
  for (int m : {3, 17, 150}) {
    const auto d = rkc_tableau(m, 0.05);
    const auto l = rkc_tableau<long double>(m, 0.05L);
    CHECK(d.omega1 == Approx(double(l.omega1)).epsilon(1e-14));
    CHECK(d.alpha_m == Approx(double(l.alpha_m)).epsilon(1e-12));
    for (int j = 2; j <= m; ++j) {
      CHECK(d.mu[j] == Approx(double(l.mu[j])).epsilon(1e-13));
      CHECK(d.kappa[j] == Approx(double(l.kappa[j])).epsilon(1e-13));
    }
  }
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(rkc_tableau(0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(rkc_tableau(3, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(alpha_limit(0.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_m(0, 0.05), std::invalid_argument);
}
