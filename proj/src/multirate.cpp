#include "mrock/multirate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mrock {

std::string to_string(StageVariant v) {
  switch (v) {
    case StageVariant::Mrkc: return "mrkc";
    case StageVariant::Mrock2: return "mrock2";
    case StageVariant::Mrock2ScaleSep: return "mrock2-scale-sep";
  }
  return "?";
}

MacroLadder rock2_macro_ladder() {
  const auto ladder = rock2_ladder();
  return {std::vector<int>(ladder.begin(), ladder.end()), [](int s) { return rock2_tableau(s).ell; }};
}

namespace {

// Smallest m >= 2 with eta(m) rho_F <= beta m^2.
template <typename EtaOf>
int micro_stages(EtaOf eta_of, double rho_fast, double beta, int stage_cap, double& eta_out) {
  // eta(m) >= eta(inf), so this start never overshoots the minimum.
  const double eta_inf = eta_of(std::numeric_limits<double>::infinity());
  int m = std::max(2, static_cast<int>(std::floor(std::sqrt(eta_inf * rho_fast / beta))));
  for (;; ++m) {
    check_stage_cap(m, stage_cap, "micro step");
    const double eta = eta_of(double(m));
    if (eta * rho_fast <= beta * double(m) * double(m)) {
      eta_out = eta;
      return m;
    }
  }
}

}  // namespace

StageSelection get_stages(StageVariant variant, double tau, double rho_slow, double rho_fast, double eps,
                          int stage_cap) {
  if (variant == StageVariant::Mrkc) return get_stages(variant, tau, rho_slow, rho_fast, eps, MacroLadder{}, stage_cap);
  return get_stages(variant, tau, rho_slow, rho_fast, eps, rock2_macro_ladder(), stage_cap);
}

StageSelection get_stages(StageVariant variant, double tau, double rho_slow, double rho_fast, double eps,
                          const MacroLadder& ladder, int stage_cap) {
  if (!(tau > 0.0)) throw std::invalid_argument("get_stages: tau must be > 0");
  if (!(rho_slow >= 0.0) || !(rho_fast >= 0.0)) throw std::invalid_argument("get_stages: radii must be >= 0");
  const double beta = 2.0 - 4.0 * eps / 3.0;

  StageSelection sel;
  sel.variant = variant;
  if (variant == StageVariant::Mrkc) {
    sel.s = std::max(1, static_cast<int>(std::ceil(std::sqrt(tau * rho_slow / beta))));
    while (beta * double(sel.s) * sel.s < tau * rho_slow) ++sel.s;
    check_stage_cap(sel.s, stage_cap, "mrkc macro step");
    sel.ell_s = beta * double(sel.s) * sel.s;
  } else {
    if (ladder.degrees.empty()) throw std::invalid_argument("get_stages: empty macro ladder");
    const double need = kMrock2MacroFactor * tau * rho_slow;
    sel.s = -1;
    for (int s : ladder.degrees) {
      if (ladder.length(s) >= need) {
        sel.s = s;
        break;
      }
    }
    if (sel.s < 0) {
      throw StageLimitError("mrock2 macro step: 1.35 tau rho_S = " + std::to_string(need) +
                            " exceeds the largest stability interval; reduce the step size");
    }
    check_stage_cap(sel.s, stage_cap, "mrock2 macro step");
    sel.ell_s = ladder.length(sel.s);
  }

  const double base = 6.0 * tau / sel.ell_s;
  if (variant == StageVariant::Mrock2ScaleSep) {
    const double eta_bar = kScaleSepMicroFactor * tau / sel.ell_s;
    sel.m = micro_stages([eta_bar](double) { return eta_bar; }, rho_fast, beta, stage_cap, sel.eta);
  } else {
    sel.m = micro_stages(
        [base](double m) { return std::isinf(m) ? base : base * m * m / (m * m - 1.0); }, rho_fast, beta,
        stage_cap, sel.eta);
  }
  return sel;
}

namespace {

struct CountedParts {
  const SplitSystem& sys;
  EvalCounter& counter;

  void fast(double t, const Vector& y, Vector& out) const {
    ++counter.fast;
    if (sys.fast) {
      sys.fast(t, y, out);
    } else {
      out.setZero(y.size());
    }
  }
  void slow(double t, const Vector& y, Vector& out) const {
    ++counter.slow;
    sys.slow(t, y, out);
  }
};

}  // namespace

MultirateStepResult mrkc_step_with(const SplitSystem& sys, double t, const Vector& y, double tau,
                                   const StageSelection& stages, double eps, EvalCounter& counter) {
  const CountedParts parts{sys, counter};
  const auto micro = rkc_tableau(stages.m, eps);
  const auto macro = rkc_tableau(stages.s, eps);
  auto fast = [&](double r, const Vector& u, Vector& out) { parts.fast(r, u, out); };
  auto slow = [&](double r, const Vector& u, Vector& out) { parts.slow(r, u, out); };
  auto fbar = [&](double r, const Vector& u, Vector& out) {
    out = averaged_force_1(fast, slow, r, u, stages.eta, micro);
  };
  MultirateStepResult res;
  res.stages = stages;
  res.y = rkc_step(fbar, t, y, tau, macro);
  return res;
}

MultirateStepResult mrkc_step(const SplitSystem& sys, double t, const Vector& y, double tau, EvalCounter& counter,
                              const MultirateOptions& opts) {
  const auto stages =
      get_stages(StageVariant::Mrkc, tau, sys.rho_slow(t, y), sys.rho_fast(t, y), opts.eps, opts.stage_cap);
  return mrkc_step_with(sys, t, y, tau, stages, opts.eps, counter);
}

MultirateStepResult mrock2_step_with(const SplitSystem& sys, double t, const Vector& y, double tau,
                                     const StageSelection& stages, double eps, EvalCounter& counter,
                                     const Tolerance& tol) {
  const CountedParts parts{sys, counter};
  const auto micro = rkc_tableau(stages.m, eps);
  const auto& macro = rock2_tableau(stages.s);
  auto fast = [&](double r, const Vector& u, Vector& out) { parts.fast(r, u, out); };
  auto slow = [&](double r, const Vector& u, Vector& out) { parts.slow(r, u, out); };
  auto fbar = [&](double r, const Vector& u, Vector& out) {
    out = averaged_force_2(fast, slow, r, u, stages.eta, micro);
  };
  auto step = rock2_step(fbar, t, y, tau, macro, tol);
  MultirateStepResult res;
  res.stages = stages;
  res.stages.s = macro.s;
  res.y = std::move(step.y);
  res.err = step.err;
  return res;
}

MultirateStepResult mrock2_step(const SplitSystem& sys, double t, const Vector& y, double tau, EvalCounter& counter,
                                const MultirateOptions& opts) {
  const auto variant = opts.scale_sep ? StageVariant::Mrock2ScaleSep : StageVariant::Mrock2;
  const auto stages = get_stages(variant, tau, sys.rho_slow(t, y), sys.rho_fast(t, y), opts.eps, opts.stage_cap);
  return mrock2_step_with(sys, t, y, tau, stages, opts.eps, counter, opts.tol);
}

}  // namespace mrock
