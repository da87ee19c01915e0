#pragma once

// Multirate explicit stabilized steps built on averaged forces.
//
// The averaged force replaces f = f_F + f_S by (u(eta) - y)/eta, where u
// solves a fast auxiliary problem with f_S frozen at y over a micro interval
// eta. Its stiffness is governed by f_S only, so the macro method needs a
// stage count driven by rho_S, while the fast part is stabilized by m-stage
// RKC micro solves.

#include <functional>
#include <string>
#include <vector>

#include "mrock/cheb_core.hpp"
#include "mrock/problems.hpp"
#include "mrock/rkc.hpp"
#include "mrock/rock2.hpp"
#include "mrock/types.hpp"

namespace mrock {

enum class StageVariant {
  Mrkc,            // RKC macro, first-order averaged force
  Mrock2,          // ROCK2 macro, second-order averaged force
  Mrock2ScaleSep,  // as Mrock2 with the relaxed micro step 2.8 tau / ell_s
};

std::string to_string(StageVariant v);

struct StageSelection {
  int s = 0;       // macro stages
  int m = 0;       // micro stages, always >= 2
  double eta = 0;  // micro step
  StageVariant variant = StageVariant::Mrkc;
  double ell_s = 0;  // stability length used for the macro constraint
};

/// Admissible macro degrees and their stability lengths.
struct MacroLadder {
  std::vector<int> degrees;
  std::function<double(int s)> length;
};

/// The ROCK2 ladder with the verified tableau lengths.
MacroLadder rock2_macro_ladder();

/// Smallest (s, m) satisfying the stability constraints of `variant`:
///
///   mRKC:    tau rho_S <= beta s^2,  eta rho_F <= beta m^2,
///            eta = 6 tau/(beta s^2) * m^2/(m^2 - 1)
///   mROCK2:  1.35 tau rho_S <= ell_s,  eta rho_F <= beta m^2,
///            eta = 6 tau/ell_s * m^2/(m^2 - 1)
///   scale separation: eta = 2.8 tau/ell_s with the same macro constraint
///
/// with beta = 2 - 4 eps/3. s is solved first; m is then increased from 2
/// with eta recomputed for each candidate.
StageSelection get_stages(StageVariant variant, double tau, double rho_slow, double rho_fast, double eps,
                          int stage_cap = kDefaultStageCap);

/// Same with an explicit macro ladder (mROCK2 variants only).
StageSelection get_stages(StageVariant variant, double tau, double rho_slow, double rho_fast, double eps,
                          const MacroLadder& ladder, int stage_cap = kDefaultStageCap);

/// Macro-constraint safety factor 1 + alpha(0.05) rounded up.
inline constexpr double kMrock2MacroFactor = 1.35;
/// Relaxed micro step factor under scale separation.
inline constexpr double kScaleSepMicroFactor = 2.8;

/// First-order averaged force (u_eta - y)/eta with
///   u' = f_F(u) + f_S(t, y),  u(0) = y,
/// approximated by one m-stage RKC step. f_S is evaluated once.
///
/// The micro solve runs on the increment d = u - y, so that (u - y)/eta
/// carries no cancellation when eta |f| is small against |y|.
template <typename Fast, typename Slow>
Vector averaged_force_1(Fast&& f_fast, Slow&& f_slow, double t, const Vector& y, double eta,
                        const RkcTableau<double>& micro) {
  Vector frozen(y.size());
  f_slow(t, y, frozen);
  Vector shifted(y.size());
  auto fd = [&](double r, const Vector& d, Vector& out) {
    shifted.noalias() = y + d;
    f_fast(r, shifted, out);
    out += frozen;
  };
  const Vector du = rkc_step(fd, t, Vector::Zero(y.size()), eta, micro);
  return du / eta;
}

template <typename Fast, typename Slow>
Vector averaged_force_1(Fast&& f_fast, Slow&& f_slow, double t, const Vector& y, double eta, int m,
                        double eps) {
  return averaged_force_1(f_fast, f_slow, t, y, eta, rkc_tableau(m, eps));
}

/// Second-order averaged force (v_eta - y)/eta: after the first-order force
/// fbar_1, a second micro solve of
///   v' = f_F(v - (alpha_m eta/2) fbar_1) + f_S(t, y),  v(0) = y.
/// The alpha_m = P_m''(0) shift cancels the O(eta) defect of the RKC micro
/// solve. 2m evaluations of f_F, one of f_S.
template <typename Fast, typename Slow>
Vector averaged_force_2(Fast&& f_fast, Slow&& f_slow, double t, const Vector& y, double eta,
                        const RkcTableau<double>& micro) {
  Vector frozen(y.size());
  f_slow(t, y, frozen);
  Vector shifted(y.size());
  const Vector zero = Vector::Zero(y.size());
  auto fu = [&](double r, const Vector& d, Vector& out) {
    shifted.noalias() = y + d;
    f_fast(r, shifted, out);
    out += frozen;
  };
  const Vector du = rkc_step(fu, t, zero, eta, micro);
  const Vector base = y - (micro.alpha_m * 0.5) * du;  // y - (alpha_m eta/2) fbar_1
  auto fv = [&](double r, const Vector& d, Vector& out) {
    shifted.noalias() = base + d;
    f_fast(r, shifted, out);
    out += frozen;
  };
  const Vector dv = rkc_step(fv, t, zero, eta, micro);
  return dv / eta;
}

template <typename Fast, typename Slow>
Vector averaged_force_2(Fast&& f_fast, Slow&& f_slow, double t, const Vector& y, double eta, int m,
                        double eps) {
  return averaged_force_2(f_fast, f_slow, t, y, eta, rkc_tableau(m, eps));
}

struct MultirateOptions {
  double eps = 0.05;
  bool scale_sep = false;  // mROCK2 only
  int stage_cap = kDefaultStageCap;
  Tolerance tol{};
};

struct MultirateStepResult {
  Vector y;
  StageSelection stages;
  double err = 0.0;  // embedded estimate, mROCK2 only
};

/// One mRKC step: s-stage RKC applied to the first-order averaged force.
/// Evaluations per step: s of f_S and m*s of f_F.
MultirateStepResult mrkc_step(const SplitSystem& sys, double t, const Vector& y, double tau, EvalCounter& counter,
                              const MultirateOptions& opts = {});

/// One mROCK2 step: s-stage ROCK2 applied to the second-order averaged force,
/// with the ROCK2 embedded error estimate. Evaluations per step: s of f_S
/// and 2 m s of f_F.
MultirateStepResult mrock2_step(const SplitSystem& sys, double t, const Vector& y, double tau, EvalCounter& counter,
                                const MultirateOptions& opts = {});

/// Same steps with the stage selection supplied by the caller.
MultirateStepResult mrkc_step_with(const SplitSystem& sys, double t, const Vector& y, double tau,
                                   const StageSelection& stages, double eps, EvalCounter& counter);
MultirateStepResult mrock2_step_with(const SplitSystem& sys, double t, const Vector& y, double tau,
                                     const StageSelection& stages, double eps, EvalCounter& counter,
                                     const Tolerance& tol = {});

}  // namespace mrock
