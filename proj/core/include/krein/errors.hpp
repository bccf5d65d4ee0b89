#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace krein {

/// Failure categories raised by the library. The names are part of the
/// stable interface: the CLI maps some of them onto exit codes.
enum class ErrorKind {
  NonFinite,
  DimensionMismatch,
  SingularShift,
  NoConvergence,
  NotMaximal,
  NotNonnegative,
  NormExceeded,
  ContourTooClose,
  QuadratureNotConverged,
  BoundaryEigenvalue,
  RankAmbiguous,
  HypothesisViolated,
  RankDeficientBasis,
  NotUniformlyDissipative,
  NotDissipative,
  ConditionIFailed,
  NoCauchyConvergence,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace krein
