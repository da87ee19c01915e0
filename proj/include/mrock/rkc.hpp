#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "mrock/cheb_core.hpp"
#include "mrock/error.hpp"
#include "mrock/types.hpp"

namespace mrock {

/// Default cap on the stage count of a single RKC solve.
inline constexpr int kDefaultStageCap = 100000;

/// Smallest stage count with tau*rho <= beta m^2 as used in practice:
/// floor(sqrt(tau rho / beta)) + 1, beta = 2 - 4 eps/3.
inline int rkc_stage_count(double tau_rho, double eps) {
  if (!(tau_rho >= 0.0)) throw std::invalid_argument("rkc_stage_count: tau*rho must be >= 0");
  const double beta = 2.0 - 4.0 * eps / 3.0;
  return static_cast<int>(std::floor(std::sqrt(tau_rho / beta))) + 1;
}

inline void check_stage_cap(int stages, int cap, const std::string& who) {
  if (stages > cap) {
    throw StageLimitError(who + ": " + std::to_string(stages) + " stages exceed the cap of " +
                          std::to_string(cap) + "; the problem is too stiff for an explicit method, "
                          "use a smaller step or an implicit integrator");
  }
}

/// One step of the m-stage damped RKC method
///
///   k_0 = y,  k_1 = k_0 + mu_1 tau f(k_0),
///   k_j = nu_j k_{j-1} + kappa_j k_{j-2} + mu_j tau f(k_{j-1}),
///
/// returning k_m. Exactly m calls of f(t, y, out). Stage times follow the
/// same recurrence applied to t' = 1.
template <typename F>
Vector rkc_step(F&& f, double t, const Vector& y, double tau, const RkcTableau<double>& tab) {
  const int m = tab.m;
  Vector kjm2 = y;
  Vector kjm1(y.size());
  Vector fk(y.size());

  f(t, kjm2, fk);
  kjm1.noalias() = kjm2 + (tab.mu[1] * tau) * fk;
  if (!kjm1.allFinite()) throw OverflowError("rkc", 1);
  if (m == 1) return kjm1;

  double cjm2 = 0.0;
  double cjm1 = tab.mu[1];
  Vector kj(y.size());
  for (int j = 2; j <= m; ++j) {
    f(t + cjm1 * tau, kjm1, fk);
    kj.noalias() = tab.nu[j] * kjm1 + tab.kappa[j] * kjm2 + (tab.mu[j] * tau) * fk;
    if (!kj.allFinite()) throw OverflowError("rkc", j);
    const double cj = tab.nu[j] * cjm1 + tab.kappa[j] * cjm2 + tab.mu[j];
    cjm2 = cjm1;
    cjm1 = cj;
    std::swap(kjm2, kjm1);
    std::swap(kjm1, kj);
  }
  return kjm1;
}

}  // namespace mrock
