#include "krein/errors.hpp"

namespace krein {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularShift: return "SingularShift";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotMaximal: return "NotMaximal";
    case ErrorKind::NotNonnegative: return "NotNonnegative";
    case ErrorKind::NormExceeded: return "NormExceeded";
    case ErrorKind::ContourTooClose: return "ContourTooClose";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::BoundaryEigenvalue: return "BoundaryEigenvalue";
    case ErrorKind::RankAmbiguous: return "RankAmbiguous";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::RankDeficientBasis: return "RankDeficientBasis";
    case ErrorKind::NotUniformlyDissipative: return "NotUniformlyDissipative";
    case ErrorKind::NotDissipative: return "NotDissipative";
    case ErrorKind::ConditionIFailed: return "ConditionIFailed";
    case ErrorKind::NoCauchyConvergence: return "NoCauchyConvergence";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace krein
