#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace mrock {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vector = Eigen::VectorXd;

/// Right-hand side evaluated in place: out = f(t, y).
using Rhs = std::function<void(double t, const Vector& y, Vector& out)>;

/// Spectral-radius provider rho(t, y) for the Jacobian of some rhs.
using RadiusFn = std::function<double(double t, const Vector& y)>;

/// Per-run evaluation counters. Not shared between concurrent runs.
struct EvalCounter {
  std::uint64_t fast = 0;
  std::uint64_t slow = 0;
  std::uint64_t full = 0;

  EvalCounter& operator+=(const EvalCounter& o) {
    fast += o.fast;
    slow += o.slow;
    full += o.full;
    return *this;
  }
};

}  // namespace mrock
