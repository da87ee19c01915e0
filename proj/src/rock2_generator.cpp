#include "mrock/rock2_generator.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace mrock {
namespace {

struct Recurrence {
  // P_{j}(x) = (a_j x + b_j) P_{j-1}(x) - c_j P_{j-2}(x), j = 1..n, P_j(1) = 1.
  Vector a, b, c;
};

// Orthogonal polynomials of degree <= n for the weight w(z(x))^2/sqrt(1-x^2),
// normalized to P_j(1) = 1.
Recurrence orthogonal_recurrence(int n, double length, double sigma1, double sigma2) {
  const int nodes = 2 * (n + 2) + 16;
  Vector x(nodes), wt(nodes);
  for (int k = 0; k < nodes; ++k) {
    x[k] = std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * nodes));
    const double z = length * (x[k] - 1.0) / 2.0;
    const double w = 1.0 + 2.0 * sigma1 * z + sigma2 * z * z;
    wt[k] = w * w;
  }

  // Discrete Stieltjes procedure in orthonormal form:
  // x p_j = beta_{j+1} p_{j+1} + alpha_j p_j + beta_j p_{j-1}.
  Recurrence rec{Vector::Zero(n + 1), Vector::Zero(n + 1), Vector::Zero(n + 1)};
  Vector pprev = Vector::Zero(nodes);
  Vector p = Vector::Constant(nodes, 1.0 / std::sqrt(wt.sum()));
  Vector q(nodes);
  double beta_prev = 0.0;
  double ratio_prev = 0.0;  // p_{j-1}(1)/p_{j-2}(1)
  for (int j = 0; j < n; ++j) {
    const double alpha = (wt.array() * x.array() * p.array().square()).sum();
    q = (x.array() - alpha) * p.array() - beta_prev * pprev.array();
    const double beta = std::sqrt((wt.array() * q.array().square()).sum());
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::runtime_error("stieltjes breakdown");

    // Ratio r = p_{j+1}(1)/p_j(1) and the normalized recurrence.
    const double ratio = j == 0 ? (1.0 - alpha) / beta : ((1.0 - alpha) - beta_prev / ratio_prev) / beta;
    const double a = 1.0 / (beta * ratio);
    rec.a[j + 1] = a;
    rec.b[j + 1] = -alpha * a;
    rec.c[j + 1] = j == 0 ? 0.0 : beta_prev / (beta * ratio * ratio_prev);

    pprev = p;
    p = q / beta;
    beta_prev = beta;
    ratio_prev = ratio;
  }
  return rec;
}

// P_n(z), P_n'(z), P_n''(z)/2 at z = 0 with x = 1 + 2z/length.
std::array<double, 3> taylor_at_zero(const Recurrence& rec, int n, double length) {
  const double dx = 2.0 / length;
  std::array<double, 3> pm{0, 0, 0};
  std::array<double, 3> p{1, 0, 0};
  for (int j = 1; j <= n; ++j) {
    const double lin = rec.a[j] + rec.b[j];  // value of a x + b at x = 1
    const double slope = rec.a[j] * dx;
    const std::array<double, 3> next{
        lin * p[0] - rec.c[j] * pm[0],
        lin * p[1] + slope * p[0] - rec.c[j] * pm[1],
        lin * p[2] + slope * p[1] - rec.c[j] * pm[2],
    };
    pm = p;
    p = next;
  }
  return p;
}

// Fixed-point map (sigma1, sigma2) -> coefficients solving the order
// conditions for the polynomial induced by the current weight.
Eigen::Vector2d order_condition_map(int s, double length, const Eigen::Vector2d& sig) {
  const int n = s - 2;
  const Recurrence rec = orthogonal_recurrence(n, length, sig[0], sig[1]);
  const auto p = taylor_at_zero(rec, n, length);
  // R = (1 + 2 s1 z + s2 z^2)(1 + p1 z + p2 z^2 + ...) = 1 + z + z^2/2 + ...
  const double s1 = (1.0 - p[1]) / 2.0;
  const double s2 = 0.5 - p[2] - 2.0 * s1 * p[1];
  return {s1, s2};
}

Rock2Tableau assemble(int s, double length, const Eigen::Vector2d& sig) {
  const int n = s - 2;
  const Recurrence rec = orthogonal_recurrence(n, length, sig[0], sig[1]);
  Rock2Tableau tab;
  tab.s = s;
  tab.sigma1 = sig[0];
  tab.sigma2 = sig[1];
  tab.ell = length;
  tab.mu = Vector::Zero(n + 1);
  tab.nu = Vector::Zero(n + 1);
  tab.kappa = Vector::Zero(n + 1);
  // (a x + b) P = (a + b) P + (2a/L) z P.
  for (int j = 1; j <= n; ++j) {
    tab.mu[j] = 2.0 * rec.a[j] / length;
    tab.nu[j] = j == 1 ? 0.0 : -(rec.a[j] + rec.b[j]);
    tab.kappa[j] = rec.c[j];
  }
  return tab;
}

}  // namespace

std::optional<Rock2Tableau> rock2_tableau_for_mapping(int s, double length, const Rock2GeneratorOptions& opts) {
  if (s < kRock2MinDegree) throw std::invalid_argument("rock2 generator: degree must be >= 3");
  Eigen::Vector2d sig(0.37, 0.28);
  auto residual = [&](const Eigen::Vector2d& v) { return Eigen::Vector2d(v - order_condition_map(s, length, v)); };
  try {
    Eigen::Vector2d r = residual(sig);
    for (int it = 0; it < opts.newton_max_iter && r.norm() > opts.newton_tol; ++it) {
      Eigen::Matrix2d jac;
      for (int k = 0; k < 2; ++k) {
        Eigen::Vector2d h = Eigen::Vector2d::Zero();
        h[k] = 1e-7 * std::max(1.0, std::abs(sig[k]));
        jac.col(k) = (residual(sig + h) - residual(sig - h)) / (2.0 * h[k]);
      }
      const Eigen::Vector2d step = jac.fullPivLu().solve(-r);
      double damp = 1.0;
      Eigen::Vector2d trial = sig + step;
      Eigen::Vector2d rt = residual(trial);
      while (!(rt.norm() < r.norm()) && damp > 1e-4) {
        damp *= 0.5;
        trial = sig + damp * step;
        rt = residual(trial);
      }
      if (!(rt.norm() < r.norm())) break;
      sig = trial;
      r = rt;
    }
    if (!(r.norm() <= 1e3 * opts.newton_tol) || !sig.allFinite()) return std::nullopt;
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
  return assemble(s, length, sig);
}

double rock2_max_abs_on(const Rock2Tableau& tab, double length) {
  const int samples = 200 * tab.s + 400;
  const double h = length / samples;
  double worst = 0.0;
  double prev2 = std::abs(rock2_stability(tab, 0.0));
  double prev1 = std::abs(rock2_stability(tab, -h));
  worst = std::max(prev2, prev1);
  for (int k = 2; k <= samples; ++k) {
    const double cur = std::abs(rock2_stability(tab, -k * h));
    worst = std::max(worst, cur);
    if (prev1 >= prev2 && prev1 >= cur && prev1 > 0.98) {
      // Golden-section refinement of the local maximum around -(k-1)h.
      double lo = -(k)*h, hi = -(k - 2) * h;
      const double g = (std::sqrt(5.0) - 1.0) / 2.0;
      for (int it = 0; it < 60; ++it) {
        const double c1 = hi - g * (hi - lo), c2 = lo + g * (hi - lo);
        if (std::abs(rock2_stability(tab, c1)) > std::abs(rock2_stability(tab, c2)))
          hi = c2;
        else
          lo = c1;
      }
      worst = std::max(worst, std::abs(rock2_stability(tab, 0.5 * (lo + hi))));
    }
    prev2 = prev1;
    prev1 = cur;
  }
  return worst;
}

Rock2Tableau generate_rock2_tableau(int s, const Rock2GeneratorOptions& opts) {
  const double s2 = double(s) * double(s);
  auto feasible = [&](double length) -> std::optional<Rock2Tableau> {
    auto tab = rock2_tableau_for_mapping(s, length, opts);
    if (!tab) return std::nullopt;
    if (rock2_max_abs_on(*tab, length) > 1.0 + 1e-13) return std::nullopt;
    return tab;
  };
  double lo = opts.lower_factor * s2;
  double hi = opts.upper_factor * s2;
  auto best = feasible(lo);
  if (!best) throw std::runtime_error("rock2 generator: lower bracket infeasible for s = " + std::to_string(s));
  if (feasible(hi)) throw std::runtime_error("rock2 generator: upper bracket feasible for s = " + std::to_string(s));
  for (int it = 0; it < opts.bisection_steps; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (auto t = feasible(mid)) {
      lo = mid;
      best = std::move(t);
    } else {
      hi = mid;
    }
  }
  return *best;
}

}  // namespace mrock
