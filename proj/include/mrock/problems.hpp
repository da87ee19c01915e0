#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/SparseCore>

#include "mrock/types.hpp"

namespace mrock {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// y' = f_F(t, y) + f_S(t, y): a cheap, severely stiff part and an
/// expensive, mildly stiff part, with spectral-radius providers for both and
/// for the sum. An empty `fast` means f_F = 0.
struct SplitSystem {
  std::string name;
  Rhs fast;
  Rhs slow;
  RadiusFn rho_fast;
  RadiusFn rho_slow;
  RadiusFn rho_full;
  Vector y0;
  std::function<Vector(double t)> exact;  // optional closed-form solution

  Eigen::Index dim() const { return y0.size(); }

  /// f = f_F + f_S as a single rhs (two evaluations per call).
  Rhs full() const;
};

/// Robertson kinetics with the fast part -1e4 y2 y3 split off.
SplitSystem robertson();

/// The unsplit Robertson rhs.
void robertson_rhs(double t, const Vector& y, Vector& out);

/// Scalar y' = lambda y + zeta y with f_F = lambda y, f_S = zeta y.
SplitSystem multirate_test(double lambda, double zeta, double y0 = 1.0);

/// Time-dependent source G(t) written into `out`.
using Source = std::function<void(double t, Vector& out)>;

struct LinearRadiusOptions {
  double tol = 1e-3;
  int max_iter = 2000;
};

/// f_F = A_F y, f_S = A_S y + G(t). Radii by power iteration on A_F, A_S and
/// A_F + A_S, computed once and cached.
SplitSystem linear_system(SparseMatrix a_fast, SparseMatrix a_slow, Source source, Vector y0,
                          const LinearRadiusOptions& opts = {});

}  // namespace mrock
