#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mrock/multirate.hpp"
#include "mrock/problems.hpp"
#include "mrock/rkc.hpp"
#include "mrock/types.hpp"

namespace mrock {

enum class Method { Rkc, Rock2, Mrkc, Mrock2 };

std::string to_string(Method m);

/// Parses "rkc", "rock2", "mrkc" or "mrock2"; throws std::invalid_argument.
Method parse_method(const std::string& name);

/// True for the methods with an embedded error estimator.
bool has_error_estimate(Method m);

struct FixedStep {
  double tau = 0.0;
};

struct AdaptiveStep {
  double rtol = 1e-4;
  double atol = 1e-4;
  double tau0 = 0.0;  // 0: (t_end - t0) * 1e-4
  double tau_min = 1e-14;
  double tau_max = std::numeric_limits<double>::infinity();
};

using StepControl = std::variant<FixedStep, AdaptiveStep>;

struct StepRecord {
  double t = 0.0;  // start of the step
  double tau = 0.0;
  int s = 0;
  int m = 0;       // 0 for single-rate methods
  double eta = 0;  // 0 for single-rate methods
  std::optional<double> err;
  bool accepted = true;
  EvalCounter evals;  // evaluations spent on this attempt
};

struct IntegrationStats {
  std::uint64_t steps_accepted = 0;
  std::uint64_t steps_rejected = 0;
  EvalCounter evals;  // fast: f_F, slow: f_S, full: f = f_F + f_S
  std::vector<StepRecord> stage_history;
  double final_time = 0.0;
};

/// Called after every accepted step with the new state.
using Observer = std::function<void(const StepRecord& step, double t_new, const Vector& y)>;

struct IntegrateOptions {
  Method method = Method::Mrock2;
  StepControl control = FixedStep{};
  double eps = 0.05;
  bool scale_sep = false;  // mROCK2 only
  int stage_cap = kDefaultStageCap;
  bool record_history = true;
  Observer observer;
};

struct IntegrationResult {
  Vector y;
  IntegrationStats stats;
};

struct ControllerLimits {
  double tau_min = 0.0;
  double tau_max = std::numeric_limits<double>::infinity();
};

inline constexpr double kControllerSafety = 0.8;
inline constexpr double kMaxGrowth = 2.0;
inline constexpr double kMaxShrink = 0.1;

/// Next step size from scaled errors (accept iff err <= 1):
///   tau_c = 0.8 tau_n err_new^{-1/2}
///   tau_g = tau_c (tau_n/tau_prev) (err_prev/err_new)^{1/2}
/// Returns min(tau_c, tau_g), or tau_c alone on the first step and right
/// after a rejection; then limited to [0.1 tau_n, 2 tau_n] and clamped to
/// `limits`. tau_prev and err_prev are ignored when first_or_rejected.
double propose_step(double tau_n, double tau_prev, double err_new, double err_prev, bool first_or_rejected,
                    const ControllerLimits& limits = {});

/// Integrates sys from t0 to t_end starting at sys.y0. Adaptive steps are
/// capped at the largest step the ROCK2 ladder (within stage_cap) stabilises.
IntegrationResult integrate(const SplitSystem& sys, double t0, double t_end, const IntegrateOptions& opts);

/// Same from an explicit initial state.
IntegrationResult integrate(const SplitSystem& sys, double t0, const Vector& y0, double t_end,
                            const IntegrateOptions& opts);

/// Classical fourth-order Runge-Kutta with constant step dt (the last step
/// is shortened to land on t_end). Used for reference solutions.
Vector rk4_solve(const Rhs& f, double t0, const Vector& y0, double t_end, double dt);

/// Wraps an unsplit rhs as a system with f_F = 0 and f_S = f.
SplitSystem single_rate_system(std::string name, Rhs f, RadiusFn rho, Vector y0);

}  // namespace mrock
