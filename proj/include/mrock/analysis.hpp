#pragma once

// Scalar oracles on the multirate test equation y' = lambda y + zeta y,
// stability scans and the cost model of mROCK2 against ROCK2.

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace mrock {

/// (e^z - 1)/z with phi(0) = 1.
double phi_exact(double z);

/// Rate multiplier of the exact second-order modified equation,
///   phi(eta lambda)(lambda + zeta)(1 - (eta lambda/2) phi(eta lambda)).
double modified_rhs_order2(double lambda, double zeta, double eta);

/// tau Phi_m(eta lambda)(lambda + zeta): the argument fed to the macro RKC.
double mrkc_inner(double lambda, double zeta, double tau, double eta, int m, double eps);

/// tau Phi_m(z)(lambda + zeta)(1 - (z alpha_m/2) Phi_m(z)) with z = eta lambda.
double mrock2_inner(double lambda, double zeta, double tau, double eta, int m, double eps);

/// R_s(mrkc_inner(...)) with the s-stage damped RKC polynomial.
double mrkc_stability_value(double lambda, double zeta, double tau, double eta, int s, int m, double eps);

/// R_s(mrock2_inner(...)) with the ROCK2 polynomial of the smallest ladder
/// degree >= s.
double mrock2_stability_value(double lambda, double zeta, double tau, double eta, int s, int m, double eps);

enum class SpeedupVariant { Standard, ScaleSep };

/// sqrt(3/4) sqrt(1 + r) / (1 + c_F (sqrt(k r) - 1)), k = 9 (standard) or
/// 4 (scale separation).
double speedup(double r_rho, double c_fast, SpeedupVariant variant = SpeedupVariant::Standard);

/// Cost per step of ROCK2, sqrt(5 tau (rho_F + rho_S)/4), in units of one
/// evaluation of f.
double rock2_cost(double tau, double rho_fast, double rho_slow);

/// Cost per step of mROCK2, (1 - c_F) sqrt(5 tau rho_S/3) + c_F sqrt(15 tau rho_F).
double mrock2_cost(double tau, double rho_fast, double rho_slow, double c_fast);

/// Extremes of Phi_m(z)(z + w) over a uniform grid of z in [-ell_m, 0].
struct PhiProductRange {
  double min = 0.0;
  double max = 0.0;
  bool within(double w, double tol = 1e-12) const { return min >= w - tol && max <= tol; }
};
PhiProductRange phi_product_range(int m, double eps, double w, int points = 10000);

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

enum class ScanKind { Theorem22, MrkcFig2, Mrock2Fig3, ScaleSepFig4 };

std::string to_string(ScanKind k);
ScanKind parse_scan_kind(const std::string& name);

enum class GridKind { Log, Linear };

/// Parameters of a scan. Unset values (NaN, or 0 for counts) take the
/// per-kind defaults filled in by `scan_defaults`.
struct ScanParams {
  ScanKind kind = ScanKind::Mrock2Fig3;
  int s = 10;
  int m = 10;
  double eps = 0.05;
  double tau = 1.0;
  double eta = kUnset;
  double zeta = kUnset;
  GridKind grid = GridKind::Linear;
  int points = 10000;
  double decade_lo = -2.0;   // log grid: |lambda| in [10^lo, 10^hi], plus 0
  double decade_hi = 12.0;
  double lambda_min = kUnset;  // linear grid: [lambda_min, 0]
  double tol = 1e-10;
};

/// Completes NaN fields:
///   Theorem22:     zeta = -1, eta = 2/|zeta|, log grid
///   MrkcFig2:      eta = 6 tau/(beta s^2) m^2/(m^2 - 1), zeta = -beta s^2/tau
///   Mrock2Fig3:    eta = 2 tau (1 + alpha_m)/(alpha_m ell_s), zeta = -ell_s/(1.35 tau)
///   ScaleSepFig4:  eta = 2.8 tau/ell_s, zeta = -ell_s/(1.35 tau)
/// and lambda_min = -ell_m/eta for the linear grid.
ScanParams scan_defaults(ScanParams p);

struct ScanRow {
  double lambda = 0;
  double z = 0;      // eta lambda
  double inner = 0;  // modified rate (Theorem22) or macro argument
  double outer = 0;  // inner/zeta (Theorem22) or the composed stability value
  bool in_bounds = true;
  bool checked = true;  // false where the scan's bound does not apply
};

struct ScanResult {
  ScanParams params;  // with defaults filled in
  double ell_s = 0;   // macro stability length used for the bound
  double ell_m = 0;
  std::vector<ScanRow> rows;
  int violations = 0;
  double worst_margin = 0;  // smallest distance to a bound over checked rows (< 0: violated)
};

/// Evaluates the scan over its lambda grid. Bounds per kind:
///   Theorem22:     inner in [1.5 zeta, 0]
///   fig kinds:     inner in [-ell_s, 0] and |outer| <= 1
///   ScaleSepFig4:  only rows with z < -8 are checked.
/// Rows are in grid order (lambda from 0 downward).
ScanResult scan(const ScanParams& params);

/// CSV with header lambda,z,inner,outer,in_bounds.
void write_scan_csv(std::ostream& out, const ScanResult& result);

}  // namespace mrock
