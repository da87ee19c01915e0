#pragma once

// Second-order ROCK2 integrator.
//
// The first s-2 stages follow the three-term recurrence of a family of
// orthogonal polynomials P_j(z) (P_j(0) = 1):
//
//   k_1 = k_0 + tau mu_1 f(k_0)
//   k_j = tau mu_j f(k_{j-1}) - nu_j k_{j-1} - kappa_j k_{j-2},  j = 2..s-2
//
// and two finishing stages apply w(z) = 1 + 2 sigma1 z + sigma2 z^2:
//
//   k_{s-1} = k_{s-2} + tau sigma1 f(k_{s-2})
//   k*_s    = k_{s-1} + tau sigma1 f(k_{s-1})
//   k_s     = k*_s - tau sigma1 (1 - sigma2/sigma1^2) (f(k_{s-1}) - f(k_{s-2}))
//
// so that R_s(z) = w(z) P_{s-2}(z) = 1 + z + z^2/2 + O(z^3). The difference
// k*_s - k_s is the embedded error estimate.

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mrock/error.hpp"
#include "mrock/types.hpp"

namespace mrock {

struct Rock2Tableau {
  int s = 0;
  Vector mu;     // indexed by stage j = 1..s-2, entry 0 unused
  Vector nu;     // j = 2..s-2
  Vector kappa;  // j = 2..s-2
  double sigma1 = 0;
  double sigma2 = 0;
  double ell = 0;  // verified length of the real stability interval [-ell, 0]

  /// Coefficient of the correction applied in the last finishing stage.
  double correction() const { return sigma1 * (1.0 - sigma2 / (sigma1 * sigma1)); }
};

inline constexpr int kRock2MinDegree = 3;
inline constexpr int kRock2MaxDegree = 200;

/// Degrees for which coefficients are provisioned: every integer 3..20,
/// then roughly 5% geometric spacing up to 200.
std::span<const int> rock2_ladder();

/// Tableau for the smallest ladder degree >= s_requested.
/// Throws StageLimitError above the largest ladder degree.
const Rock2Tableau& rock2_tableau(int s_requested);

/// Smallest ladder tableau whose stability interval covers `length`.
const Rock2Tableau& rock2_tableau_for_length(double length);

/// Parses a coefficient asset (see data/rock2_coefficients.txt).
std::vector<Rock2Tableau> parse_rock2_table(std::istream& in);

/// Writes tableaus in the asset format.
void write_rock2_table(std::ostream& out, std::span<const Rock2Tableau> tabs);

/// Weights of the embedded-error norm
///   ||v|| = sqrt( (1/N) sum (v_i / (atol + rtol max(|y_i|, |ynew_i|)))^2 ).
struct Tolerance {
  double atol = 1.0;
  double rtol = 0.0;
};

double scaled_rms_norm(const Vector& v, const Vector& y, const Vector& ynew, const Tolerance& tol);

struct Rock2Result {
  Vector y;
  double err = 0.0;  // scaled norm of k*_s - k_s
};

/// One ROCK2 step with its embedded error estimate. Exactly s calls of f.
template <typename F>
Rock2Result rock2_step(F&& f, double t, const Vector& y, double tau, const Rock2Tableau& tab,
                       const Tolerance& tol = {}) {
  const int s = tab.s;
  const Eigen::Index n = y.size();
  Vector kjm2 = y;
  Vector kjm1(n);
  Vector kj(n);
  Vector fk(n);

  // Recurrence stages 1..s-2.
  f(t, kjm2, fk);
  kjm1.noalias() = kjm2 + (tau * tab.mu[1]) * fk;
  if (!kjm1.allFinite()) throw OverflowError("rock2", 1);
  double cjm2 = 0.0;
  double cjm1 = tab.mu[1];
  for (int j = 2; j <= s - 2; ++j) {
    f(t + cjm1 * tau, kjm1, fk);
    kj.noalias() = (tau * tab.mu[j]) * fk - tab.nu[j] * kjm1 - tab.kappa[j] * kjm2;
    if (!kj.allFinite()) throw OverflowError("rock2", j);
    const double cj = tab.mu[j] - tab.nu[j] * cjm1 - tab.kappa[j] * cjm2;
    cjm2 = cjm1;
    cjm1 = cj;
    std::swap(kjm2, kjm1);
    std::swap(kjm1, kj);
  }

  // Finishing procedure; kjm1 holds k_{s-2} at time t + c tau.
  const double c = cjm1;
  Vector fsm2(n);
  f(t + c * tau, kjm1, fsm2);
  Vector ksm1 = kjm1 + (tau * tab.sigma1) * fsm2;
  f(t + (c + tab.sigma1) * tau, ksm1, fk);
  if (!ksm1.allFinite()) throw OverflowError("rock2", s - 1);

  Rock2Result res;
  const double corr = tau * tab.correction();
  Vector diff = corr * (fk - fsm2);        // k*_s - k_s
  res.y.noalias() = ksm1 + (tau * tab.sigma1) * fk - diff;
  if (!res.y.allFinite()) throw OverflowError("rock2", s);
  res.err = scaled_rms_norm(diff, y, res.y, tol);
  return res;
}

/// R_s(z), by running the stage recurrence on y' = z y with tau = 1.
double rock2_stability(const Rock2Tableau& tab, double z);

}  // namespace mrock
