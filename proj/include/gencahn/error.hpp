#pragma once

#include <stdexcept>
#include <string>

namespace gencahn {

enum class ErrorKind {
  NonZeroMeanInput,
  QOutOfRange,
  ZeroInput,
  GridMismatch,
  NonPositiveM,
  NonPositiveMu,
  NoConvergence,
  OutOfDomain,
  SigmaOutOfRange,
  EmptyRange,
  NewtonDiverged,
  DomainEscape,
  MeanOutOfDomain,
  IntervalOutOfRange,
  DegenerateInitialGap,
  NoConvergenceWithinBudget,
  InvalidArgument,
  ConfigError,
  IoError,
};

const char* to_string(ErrorKind kind);

/// Every library failure carries a machine-checkable kind; the CLI maps kinds
/// to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gencahn
