#pragma once

// Chebyshev machinery for the first-order RKC family: the three-term
// recurrence, the damped RKC coefficients, the stability polynomial
// P_m(z) = b_m T_m(w0 + w1 z), the shifted quotient Phi_m(z) = (P_m(z) - 1)/z
// and the curvature alpha_m = P_m''(0) with its analytic limit.
//
// Everything here is templated on the scalar type so that tests can run the
// same formulas in long double as an independent cross-check.

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "mrock/types.hpp"

namespace mrock {

/// T_m(x) by the three-term recurrence T_j = 2x T_{j-1} - T_{j-2}.
template <typename Scalar>
Scalar cheb_T(int m, Scalar x) {
  assert(m >= 0);
  if (m == 0) return Scalar(1);
  Scalar tm2 = Scalar(1);
  Scalar tm1 = x;
  for (int j = 2; j <= m; ++j) {
    const Scalar tj = Scalar(2) * x * tm1 - tm2;
    tm2 = tm1;
    tm1 = tj;
  }
  return tm1;
}

/// Value and first two derivatives of T_m at one point.
template <typename Scalar>
struct ChebValue {
  Scalar value;
  Scalar d1;
  Scalar d2;
};

/// T_m, T_m', T_m'' at x by differentiating the recurrence.
template <typename Scalar>
ChebValue<Scalar> cheb_T_derivs(int m, Scalar x) {
  assert(m >= 0);
  if (m == 0) return {Scalar(1), Scalar(0), Scalar(0)};
  Scalar t0 = 1, d0 = 0, e0 = 0;  // T_{j-2} and derivatives
  Scalar t1 = x, d1 = 1, e1 = 0;  // T_{j-1}
  for (int j = 2; j <= m; ++j) {
    const Scalar t = Scalar(2) * x * t1 - t0;
    const Scalar d = Scalar(2) * t1 + Scalar(2) * x * d1 - d0;
    const Scalar e = Scalar(4) * d1 + Scalar(2) * x * e1 - e0;
    t0 = t1, d0 = d1, e0 = e1;
    t1 = t, d1 = d, e1 = e;
  }
  return {t1, d1, e1};
}

namespace detail {

// theta = arccosh(1 + delta), accurate for small delta.
template <typename Scalar>
Scalar acosh1p(Scalar delta) {
  using std::log1p;
  using std::sqrt;
  return log1p(delta + sqrt(delta * (Scalar(2) + delta)));
}

// Below this value of x = m*arccosh(w0) the hyperbolic form of T_m'' loses
// too many digits to cancellation; the derivative recurrence is used instead.
template <typename Scalar>
constexpr Scalar kHyperbolicSwitch = Scalar(0.05);

}  // namespace detail

/// T_m, T_m', T_m'' evaluated at w0 = 1 + eps/m^2.
///
/// Closed forms at eps = 0, the hyperbolic representation
///   T_m = cosh(x),  T_m' = m sinh(x)/sinh(theta),
///   T_m'' = m^2 cosh(x)/sinh^2(theta) - m w0 sinh(x)/sinh^3(theta)
/// with theta = arccosh(w0), x = m theta for eps > 0. The argument x stays
/// below sqrt(2 eps), so nothing overflows however large m is.
template <typename Scalar>
ChebValue<Scalar> cheb_at_damped_point(int m, Scalar eps) {
  using std::cosh;
  using std::sinh;
  const Scalar mm = Scalar(m) * Scalar(m);
  if (eps == Scalar(0)) {
    return {Scalar(1), mm, mm * (mm - Scalar(1)) / Scalar(3)};
  }
  const Scalar delta = eps / mm;
  const Scalar w0 = Scalar(1) + delta;
  const Scalar theta = detail::acosh1p(delta);
  const Scalar x = Scalar(m) * theta;
  if (x < detail::kHyperbolicSwitch<Scalar>) return cheb_T_derivs(m, w0);
  const Scalar sh = std::sqrt(delta * (Scalar(2) + delta));  // sinh(theta)
  const Scalar c = cosh(x);
  const Scalar s = sinh(x);
  return {c, Scalar(m) * s / sh, mm * c / (sh * sh) - Scalar(m) * w0 * s / (sh * sh * sh)};
}

/// Damped first-order RKC coefficients for m stages.
///
/// Vectors are indexed by stage number j; entries that the recurrence does
/// not use (mu_0, nu_0, nu_1, kappa_0, kappa_1) are zero.
template <typename Scalar>
struct RkcTableau {
  int m = 0;
  Scalar eps = 0;
  Scalar omega0 = 0;
  Scalar omega1 = 0;
  VectorX<Scalar> b;      // b_j = 1/T_j(w0), j = 0..m
  VectorX<Scalar> mu;     // j = 1..m
  VectorX<Scalar> nu;     // j = 2..m
  VectorX<Scalar> kappa;  // j = 2..m
  Scalar alpha_m = 0;     // P_m''(0)
  Scalar ell = 0;         // 2 w0 / w1

  /// Guaranteed stability bound beta*m^2 with beta = 2 - 4 eps/3.
  Scalar nominal_length() const { return (Scalar(2) - Scalar(4) * eps / Scalar(3)) * Scalar(m) * Scalar(m); }
};

/// alpha_m(eps) = T_m(w0) T_m''(w0) / T_m'(w0)^2 = P_m''(0).
template <typename Scalar>
Scalar alpha_m(int m, Scalar eps) {
  if (m < 1) throw std::invalid_argument("alpha_m: m must be >= 1");
  if (eps == Scalar(0)) {
    const Scalar mm = Scalar(m) * Scalar(m);
    return (mm - Scalar(1)) / (Scalar(3) * mm);
  }
  const auto t = cheb_at_damped_point(m, eps);
  return t.value * t.d2 / (t.d1 * t.d1);
}

/// lim_{m -> inf} alpha_m(eps) = coth(r) (coth(r) - 1/r), r = sqrt(2 eps).
template <typename Scalar>
Scalar alpha_limit(Scalar eps) {
  using std::sqrt;
  using std::tanh;
  if (!(eps > Scalar(0))) throw std::invalid_argument("alpha_limit: eps must be > 0");
  const Scalar r = sqrt(Scalar(2) * eps);
  const Scalar coth = Scalar(1) / tanh(r);
  return coth * (coth - Scalar(1) / r);
}

template <typename Scalar>
RkcTableau<Scalar> rkc_tableau(int m, Scalar eps) {
  using std::cosh;
  if (m < 1) throw std::invalid_argument("rkc_tableau: m must be >= 1");
  if (eps < Scalar(0)) throw std::invalid_argument("rkc_tableau: eps must be >= 0");

  RkcTableau<Scalar> tab;
  tab.m = m;
  tab.eps = eps;
  const Scalar mm = Scalar(m) * Scalar(m);
  tab.omega0 = Scalar(1) + eps / mm;

  const auto tm = cheb_at_damped_point(m, eps);
  tab.omega1 = tm.value / tm.d1;
  tab.alpha_m = alpha_m(m, eps);
  tab.ell = Scalar(2) * tab.omega0 / tab.omega1;

  tab.b.resize(m + 1);
  if (eps == Scalar(0)) {
    tab.b.setOnes();
  } else {
    const Scalar theta = detail::acosh1p(eps / mm);
    for (int j = 0; j <= m; ++j) tab.b[j] = Scalar(1) / cosh(Scalar(j) * theta);
  }

  tab.mu = VectorX<Scalar>::Zero(m + 1);
  tab.nu = VectorX<Scalar>::Zero(m + 1);
  tab.kappa = VectorX<Scalar>::Zero(m + 1);
  tab.mu[1] = tab.omega1 / tab.omega0;
  for (int j = 2; j <= m; ++j) {
    tab.mu[j] = Scalar(2) * tab.omega1 * tab.b[j] / tab.b[j - 1];
    tab.nu[j] = Scalar(2) * tab.omega0 * tab.b[j] / tab.b[j - 1];
    tab.kappa[j] = -tab.b[j] / tab.b[j - 2];
  }
  return tab;
}

/// P_m(z) = b_m T_m(w0 + w1 z).
template <typename Scalar>
Scalar rkc_stability(const RkcTableau<Scalar>& tab, Scalar z) {
  return tab.b[tab.m] * cheb_T(tab.m, tab.omega0 + tab.omega1 * z);
}

/// |z| at or below which Phi_m switches to its first-order Taylor form.
inline constexpr double kPhiTaylorSwitch = 1e-6;

/// Phi_m(z) = (P_m(z) - 1)/z, with Phi_m(0) = 1.
template <typename Scalar>
Scalar rkc_phi(const RkcTableau<Scalar>& tab, Scalar z) {
  using std::abs;
  if (abs(z) <= Scalar(kPhiTaylorSwitch)) return Scalar(1) + tab.alpha_m / Scalar(2) * z;
  return (rkc_stability(tab, z) - Scalar(1)) / z;
}

}  // namespace mrock
