#include "flatdio/errors.hpp"

namespace flatdio {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateDirection: return "DegenerateDirection";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::InvalidPairing: return "InvalidPairing";
    case ErrorKind::NonSimplePolygon: return "NonSimplePolygon";
    case ErrorKind::InconsistentOrientation: return "InconsistentOrientation";
    case ErrorKind::UnknownSurface: return "UnknownSurface";
    case ErrorKind::IrrationalAngle: return "IrrationalAngle";
    case ErrorKind::GroupTooLarge: return "GroupTooLarge";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NotUnitArea: return "NotUnitArea";
    case ErrorKind::HypothesisNotMet: return "HypothesisNotMet";
    case ErrorKind::EmptyTruncation: return "EmptyTruncation";
    case ErrorKind::NoAdmissibleInterval: return "NoAdmissibleInterval";
    case ErrorKind::DepthInfeasible: return "DepthInfeasible";
    case ErrorKind::ExtinctBranch: return "ExtinctBranch";
    case ErrorKind::ConstantsInconsistent: return "ConstantsInconsistent";
    case ErrorKind::EmptyLevel: return "EmptyLevel";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::ResonantDirection: return "ResonantDirection";
    case ErrorKind::HitsSingularity: return "HitsSingularity";
    case ErrorKind::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::MissingSeries: return "MissingSeries";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what, double value)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
      kind_(kind),
      value_(value) {}

}  // namespace flatdio
