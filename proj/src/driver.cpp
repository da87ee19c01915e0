#include "mrock/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mrock/rock2.hpp"

namespace mrock {

std::string to_string(Method m) {
  switch (m) {
    case Method::Rkc: return "rkc";
    case Method::Rock2: return "rock2";
    case Method::Mrkc: return "mrkc";
    case Method::Mrock2: return "mrock2";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "rkc") return Method::Rkc;
  if (name == "rock2") return Method::Rock2;
  if (name == "mrkc") return Method::Mrkc;
  if (name == "mrock2") return Method::Mrock2;
  throw std::invalid_argument("unknown method '" + name + "' (expected rkc, rock2, mrkc or mrock2)");
}

bool has_error_estimate(Method m) { return m == Method::Rock2 || m == Method::Mrock2; }

double propose_step(double tau_n, double tau_prev, double err_new, double err_prev, bool first_or_rejected,
                    const ControllerLimits& limits) {
  if (!(tau_n > 0.0) || !(err_new > 0.0)) throw std::invalid_argument("propose_step: tau_n and err_new must be > 0");
  const double tau_c = kControllerSafety * tau_n / std::sqrt(err_new);
  double tau = tau_c;
  if (!first_or_rejected) {
    if (!(tau_prev > 0.0) || !(err_prev > 0.0)) {
      throw std::invalid_argument("propose_step: tau_prev and err_prev must be > 0");
    }
    const double tau_g = tau_c * (tau_n / tau_prev) * std::sqrt(err_prev / err_new);
    tau = std::min(tau_c, tau_g);
  }
  tau = std::clamp(tau, kMaxShrink * tau_n, kMaxGrowth * tau_n);
  return std::clamp(tau, limits.tau_min, std::max(limits.tau_min, limits.tau_max));
}

SplitSystem single_rate_system(std::string name, Rhs f, RadiusFn rho, Vector y0) {
  SplitSystem sys;
  sys.name = std::move(name);
  sys.slow = std::move(f);
  sys.rho_slow = rho;
  sys.rho_full = rho;
  sys.rho_fast = [](double, const Vector&) { return 0.0; };
  sys.y0 = std::move(y0);
  return sys;
}

Vector rk4_solve(const Rhs& f, double t0, const Vector& y0, double t_end, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_solve: dt must be > 0");
  const Eigen::Index n = y0.size();
  Vector y = y0, k1(n), k2(n), k3(n), k4(n), tmp(n);
  const auto steps = std::uint64_t(std::ceil((t_end - t0) / dt - 1e-9));
  for (std::uint64_t k = 0; k < steps; ++k) {
    const double t = t0 + double(k) * dt;
    const double h = k + 1 == steps ? t_end - t : dt;
    f(t, y, k1);
    tmp = y + 0.5 * h * k1;
    f(t + 0.5 * h, tmp, k2);
    tmp = y + 0.5 * h * k2;
    f(t + 0.5 * h, tmp, k3);
    tmp = y + h * k3;
    f(t + h, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

namespace {

// Errors below this floor are treated as the floor by the controller.
constexpr double kErrFloor = 1e-10;

struct Attempt {
  Vector y;
  StepRecord rec;
};

Attempt attempt_step(const SplitSystem& sys, double t, const Vector& y, double tau, const IntegrateOptions& opts,
                     const Tolerance& tol) {
  Attempt a;
  a.rec.t = t;
  a.rec.tau = tau;
  EvalCounter& cnt = a.rec.evals;
  switch (opts.method) {
    case Method::Rkc: {
      const Rhs f = sys.full();
      const int s = rkc_stage_count(tau * sys.rho_full(t, y), opts.eps);
      check_stage_cap(s, opts.stage_cap, "rkc");
      a.rec.s = s;
      auto counted = [&](double r, const Vector& u, Vector& out) {
        ++cnt.full;
        f(r, u, out);
      };
      a.y = rkc_step(counted, t, y, tau, rkc_tableau(s, opts.eps));
      break;
    }
    case Method::Rock2: {
      const Rhs f = sys.full();
      const auto& tab = rock2_tableau_for_length(tau * sys.rho_full(t, y));
      check_stage_cap(tab.s, opts.stage_cap, "rock2");
      a.rec.s = tab.s;
      auto counted = [&](double r, const Vector& u, Vector& out) {
        ++cnt.full;
        f(r, u, out);
      };
      auto res = rock2_step(counted, t, y, tau, tab, tol);
      a.y = std::move(res.y);
      a.rec.err = res.err;
      break;
    }
    case Method::Mrkc:
    case Method::Mrock2: {
      MultirateOptions mo;
      mo.eps = opts.eps;
      mo.scale_sep = opts.scale_sep;
      mo.stage_cap = opts.stage_cap;
      mo.tol = tol;
      auto res = opts.method == Method::Mrkc ? mrkc_step(sys, t, y, tau, cnt, mo) : mrock2_step(sys, t, y, tau, cnt, mo);
      a.y = std::move(res.y);
      a.rec.s = res.stages.s;
      a.rec.m = res.stages.m;
      a.rec.eta = res.stages.eta;
      if (opts.method == Method::Mrock2) a.rec.err = res.err;
      break;
    }
  }
  return a;
}

// Largest step the ROCK2 ladder (within the stage cap) can stabilise at (t, y).
double stable_step_cap(const SplitSystem& sys, double t, const Vector& y, const IntegrateOptions& opts) {
  double ell = 0.0;
  for (int s : rock2_ladder()) {
    if (s > opts.stage_cap) break;
    ell = rock2_tableau(s).ell;
  }
  const double rho = opts.method == Method::Rock2 ? sys.rho_full(t, y) : kMrock2MacroFactor * sys.rho_slow(t, y);
  if (!(rho > 0.0)) return std::numeric_limits<double>::infinity();
  return ell / rho * (1.0 - 1e-12);
}

// Snaps t + tau onto t_end when the remainder would be a rounding sliver.
bool reaches_end(double t, double tau, double t_end) {
  return t + tau >= t_end - 1e-12 * std::max(1.0, std::abs(t_end));
}

}  // namespace

IntegrationResult integrate(const SplitSystem& sys, double t0, double t_end, const IntegrateOptions& opts) {
  return integrate(sys, t0, sys.y0, t_end, opts);
}

IntegrationResult integrate(const SplitSystem& sys, double t0, const Vector& y0, double t_end,
                            const IntegrateOptions& opts) {
  if (!(t_end > t0)) throw std::invalid_argument("integrate: t_end must exceed t0");
  if (!sys.slow) throw std::invalid_argument("integrate: system has no slow rhs");

  IntegrationResult out;
  out.y = y0;
  auto& stats = out.stats;
  double t = t0;

  auto finish_attempt = [&](Attempt& a, bool accepted) {
    a.rec.accepted = accepted;
    stats.evals += a.rec.evals;
    if (accepted) {
      ++stats.steps_accepted;
    } else {
      ++stats.steps_rejected;
    }
    if (opts.record_history) stats.stage_history.push_back(a.rec);
  };

  if (const auto* fixed = std::get_if<FixedStep>(&opts.control)) {
    if (!(fixed->tau > 0.0)) throw std::invalid_argument("integrate: fixed step size must be > 0");
    // Uniform grid t0 + k tau; the last step is shortened to land on t_end.
    for (std::uint64_t k = 0; t < t_end; ++k) {
      const double t_next_nominal = t0 + double(k + 1) * fixed->tau;
      const bool last = reaches_end(t0 + double(k) * fixed->tau, fixed->tau, t_end);
      const double t_next = last ? t_end : t_next_nominal;
      Attempt a = attempt_step(sys, t, out.y, t_next - t, opts, Tolerance{});
      out.y = std::move(a.y);
      finish_attempt(a, true);
      if (opts.observer) opts.observer(a.rec, t_next, out.y);
      t = t_next;
    }
    stats.final_time = t;
    return out;
  }

  const auto& ctl = std::get<AdaptiveStep>(opts.control);
  if (!has_error_estimate(opts.method)) {
    throw std::invalid_argument("integrate: adaptive control needs rock2 or mrock2 (" + to_string(opts.method) +
                                " has no error estimator)");
  }
  if (!(ctl.rtol >= 0.0) || !(ctl.atol >= 0.0) || !(ctl.rtol + ctl.atol > 0.0)) {
    throw std::invalid_argument("integrate: tolerances must be >= 0 and not both zero");
  }
  const Tolerance tol{ctl.atol, ctl.rtol};
  const ControllerLimits limits{ctl.tau_min, ctl.tau_max};
  double tau = ctl.tau0 > 0.0 ? ctl.tau0 : (t_end - t0) * 1e-4;
  tau = std::min(tau, ctl.tau_max);
  double tau_prev = 0.0;
  double err_prev = 0.0;
  bool first_or_rejected = true;

  while (t < t_end) {
    tau = std::min(tau, stable_step_cap(sys, t, out.y, opts));
    const bool last = reaches_end(t, tau, t_end);
    const double step = last ? t_end - t : tau;
    Attempt a = attempt_step(sys, t, out.y, step, opts, tol);
    const double err = std::max(*a.rec.err, kErrFloor);
    if (*a.rec.err <= 1.0) {
      const double tau_new = propose_step(step, tau_prev, err, err_prev, first_or_rejected, limits);
      out.y = std::move(a.y);
      finish_attempt(a, true);
      t = last ? t_end : t + step;
      if (opts.observer) opts.observer(a.rec, t, out.y);
      tau_prev = step;
      err_prev = err;
      first_or_rejected = false;
      tau = tau_new;
    } else {
      finish_attempt(a, false);
      tau = propose_step(step, tau_prev, err, err_prev, true, limits);
      first_or_rejected = true;
      if (tau <= ctl.tau_min && step <= ctl.tau_min) {
        throw StepSizeUnderflow("integrate: step size fell below tau_min = " + std::to_string(ctl.tau_min) +
                                " at t = " + std::to_string(t));
      }
    }
  }
  stats.final_time = t;
  return out;
}

}  // namespace mrock
