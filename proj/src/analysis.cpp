#include "mrock/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "mrock/cheb_core.hpp"
#include "mrock/multirate.hpp"
#include "mrock/rock2.hpp"

namespace mrock {

double phi_exact(double z) {
  if (std::abs(z) < 1e-8) return 1.0 + z / 2.0 + z * z / 6.0;
  return std::expm1(z) / z;
}

double modified_rhs_order2(double lambda, double zeta, double eta) {
  const double z = eta * lambda;
  const double p = phi_exact(z);
  return p * (lambda + zeta) * (1.0 - 0.5 * z * p);
}

namespace {

double mrkc_inner_with(const RkcTableau<double>& micro, double lambda, double zeta, double tau, double eta) {
  return tau * rkc_phi(micro, eta * lambda) * (lambda + zeta);
}

double mrock2_inner_with(const RkcTableau<double>& micro, double lambda, double zeta, double tau, double eta) {
  const double z = eta * lambda;
  const double p = rkc_phi(micro, z);
  return tau * p * (lambda + zeta) * (1.0 - 0.5 * z * micro.alpha_m * p);
}

}  // namespace

double mrkc_inner(double lambda, double zeta, double tau, double eta, int m, double eps) {
  return mrkc_inner_with(rkc_tableau(m, eps), lambda, zeta, tau, eta);
}

double mrock2_inner(double lambda, double zeta, double tau, double eta, int m, double eps) {
  return mrock2_inner_with(rkc_tableau(m, eps), lambda, zeta, tau, eta);
}

double mrkc_stability_value(double lambda, double zeta, double tau, double eta, int s, int m, double eps) {
  return rkc_stability(rkc_tableau(s, eps), mrkc_inner(lambda, zeta, tau, eta, m, eps));
}

double mrock2_stability_value(double lambda, double zeta, double tau, double eta, int s, int m, double eps) {
  return rock2_stability(rock2_tableau(s), mrock2_inner(lambda, zeta, tau, eta, m, eps));
}

double speedup(double r_rho, double c_fast, SpeedupVariant variant) {
  if (!(r_rho >= 0.0)) throw std::invalid_argument("speedup: r_rho must be >= 0");
  if (!(c_fast >= 0.0 && c_fast <= 1.0)) throw std::invalid_argument("speedup: c_F must lie in [0, 1]");
  const double k = variant == SpeedupVariant::Standard ? 9.0 : 4.0;
  return std::sqrt(0.75) * std::sqrt(1.0 + r_rho) / (1.0 + c_fast * (std::sqrt(k * r_rho) - 1.0));
}

double rock2_cost(double tau, double rho_fast, double rho_slow) {
  return std::sqrt(5.0 * tau * (rho_fast + rho_slow) / 4.0);
}

double mrock2_cost(double tau, double rho_fast, double rho_slow, double c_fast) {
  return (1.0 - c_fast) * std::sqrt(5.0 * tau * rho_slow / 3.0) + c_fast * std::sqrt(15.0 * tau * rho_fast);
}

PhiProductRange phi_product_range(int m, double eps, double w, int points) {
  if (points < 2) throw std::invalid_argument("phi_product_range: need at least two grid points");
  const auto tab = rkc_tableau(m, eps);
  PhiProductRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int k = 0; k < points; ++k) {
    const double z = -tab.ell * double(k) / double(points - 1);
    const double v = rkc_phi(tab, z) * (z + w);
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
  }
  return r;
}

std::string to_string(ScanKind k) {
  switch (k) {
    case ScanKind::Theorem22: return "theorem22";
    case ScanKind::MrkcFig2: return "mrkc_fig2";
    case ScanKind::Mrock2Fig3: return "mrock2_fig3";
    case ScanKind::ScaleSepFig4: return "scale_sep_fig4";
  }
  return "?";
}

ScanKind parse_scan_kind(const std::string& name) {
  for (auto k : {ScanKind::Theorem22, ScanKind::MrkcFig2, ScanKind::Mrock2Fig3, ScanKind::ScaleSepFig4}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown scan kind '" + name +
                              "' (expected theorem22, mrkc_fig2, mrock2_fig3 or scale_sep_fig4)");
}

namespace {

double macro_length(const ScanParams& p) {
  if (p.kind == ScanKind::MrkcFig2) return rkc_tableau(p.s, p.eps).ell;
  return rock2_tableau(p.s).ell;
}

}  // namespace

ScanParams scan_defaults(ScanParams p) {
  if (!(p.tau > 0.0)) throw std::invalid_argument("scan: tau must be > 0");
  if (p.kind == ScanKind::Theorem22) {
    if (std::isnan(p.zeta)) p.zeta = -1.0;
    if (std::isnan(p.eta)) p.eta = 2.0 / std::abs(p.zeta);
    if (std::isnan(p.lambda_min)) p.grid = GridKind::Log;
    return p;
  }
  const double ell_s = macro_length(p);
  const double mm = double(p.m) * p.m;
  switch (p.kind) {
    case ScanKind::MrkcFig2:
      if (std::isnan(p.eta)) {
        const double beta = 2.0 - 4.0 * p.eps / 3.0;
        p.eta = 6.0 * p.tau / (beta * double(p.s) * p.s) * mm / (mm - 1.0);
      }
      if (std::isnan(p.zeta)) p.zeta = -ell_s / p.tau;
      break;
    case ScanKind::Mrock2Fig3:
      if (std::isnan(p.eta)) {
        const double a = rkc_tableau(p.m, p.eps).alpha_m;
        p.eta = 2.0 * p.tau * (1.0 + a) / (a * ell_s);
      }
      if (std::isnan(p.zeta)) p.zeta = -ell_s / (kMrock2MacroFactor * p.tau);
      break;
    case ScanKind::ScaleSepFig4:
      if (std::isnan(p.eta)) p.eta = kScaleSepMicroFactor * p.tau / ell_s;
      if (std::isnan(p.zeta)) p.zeta = -ell_s / (kMrock2MacroFactor * p.tau);
      break;
    case ScanKind::Theorem22:
      break;
  }
  if (std::isnan(p.lambda_min)) p.lambda_min = -rkc_tableau(p.m, p.eps).ell / p.eta;
  return p;
}

ScanResult scan(const ScanParams& params) {
  ScanResult res;
  res.params = scan_defaults(params);
  const ScanParams& p = res.params;
  if (!(p.eta > 0.0)) throw std::invalid_argument("scan: eta must be > 0");
  if (p.points < 0) throw std::invalid_argument("scan: negative point count");

  std::vector<double> lambdas;
  if (p.points > 0) {
    if (p.grid == GridKind::Log) {
      lambdas.push_back(0.0);
      for (int k = 0; k < p.points; ++k) {
        const double e = p.points == 1 ? p.decade_lo : p.decade_lo + (p.decade_hi - p.decade_lo) * k / (p.points - 1);
        lambdas.push_back(-std::pow(10.0, e));
      }
    } else {
      for (int k = 0; k < p.points; ++k) {
        lambdas.push_back(p.points == 1 ? 0.0 : p.lambda_min * double(k) / double(p.points - 1));
      }
    }
  }

  const bool t22 = p.kind == ScanKind::Theorem22;
  RkcTableau<double> micro;
  RkcTableau<double> rkc_macro;
  const Rock2Tableau* rock2_macro = nullptr;
  if (!t22) {
    micro = rkc_tableau(p.m, p.eps);
    res.ell_m = micro.ell;
    if (p.kind == ScanKind::MrkcFig2) {
      rkc_macro = rkc_tableau(p.s, p.eps);
      res.ell_s = rkc_macro.ell;
    } else {
      rock2_macro = &rock2_tableau(p.s);
      res.ell_s = rock2_macro->ell;
    }
  }

  res.worst_margin = std::numeric_limits<double>::infinity();
  res.rows.reserve(lambdas.size());
  for (double lambda : lambdas) {
    ScanRow row;
    row.lambda = lambda;
    row.z = p.eta * lambda;
    double margin = 0.0;
    if (t22) {
      row.inner = modified_rhs_order2(lambda, p.zeta, p.eta);
      row.outer = p.zeta != 0.0 ? row.inner / p.zeta : 0.0;
      margin = std::min(row.inner - 1.5 * p.zeta, -row.inner);
    } else {
      if (p.kind == ScanKind::MrkcFig2) {
        row.inner = mrkc_inner_with(micro, lambda, p.zeta, p.tau, p.eta);
        row.outer = rkc_stability(rkc_macro, row.inner);
      } else {
        row.inner = mrock2_inner_with(micro, lambda, p.zeta, p.tau, p.eta);
        row.outer = rock2_stability(*rock2_macro, row.inner);
      }
      margin = std::min({row.inner + res.ell_s, -row.inner, 1.0 - std::abs(row.outer)});
      row.checked = p.kind != ScanKind::ScaleSepFig4 || row.z < -8.0;
    }
    row.in_bounds = margin >= -p.tol;
    if (row.checked) {
      res.worst_margin = std::min(res.worst_margin, margin);
      if (!row.in_bounds) ++res.violations;
    }
    res.rows.push_back(row);
  }
  if (res.rows.empty()) res.worst_margin = 0.0;
  return res;
}

void write_scan_csv(std::ostream& out, const ScanResult& result) {
  out << "lambda,z,inner,outer,in_bounds\n";
  out << std::setprecision(17);
  for (const auto& r : result.rows) {
    out << r.lambda << ',' << r.z << ',' << r.inner << ',' << r.outer << ',' << (r.in_bounds ? 1 : 0) << '\n';
  }
}

}  // namespace mrock
