#pragma once

#include <stdexcept>
#include <string>

namespace mrock {

/// Base class of all numerical failures raised by the integrators.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stage produced a non-finite value.
class OverflowError : public NumericalError {
 public:
  OverflowError(const std::string& method, int stage)
      : NumericalError(method + ": non-finite value at stage " + std::to_string(stage)),
        stage_(stage) {}
  int stage() const noexcept { return stage_; }

 private:
  int stage_;
};

/// The required stage count exceeds the configured cap.
class StageLimitError : public NumericalError {
 public:
  StageLimitError(const std::string& what_arg) : NumericalError(what_arg) {}
};

/// Adaptive step size fell below the minimum.
class StepSizeUnderflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mrock
