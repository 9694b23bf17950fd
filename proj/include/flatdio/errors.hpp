#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace flatdio {

enum class ErrorKind {
  DegenerateDirection,
  ZeroVector,
  InvalidPairing,
  NonSimplePolygon,
  InconsistentOrientation,
  UnknownSurface,
  IrrationalAngle,
  GroupTooLarge,
  BudgetExceeded,
  NotUnitArea,
  HypothesisNotMet,
  EmptyTruncation,
  NoAdmissibleInterval,
  DepthInfeasible,
  ExtinctBranch,
  ConstantsInconsistent,
  EmptyLevel,
  DegenerateFit,
  HypothesisViolated,
  ResonantDirection,
  HitsSingularity,
  RadiusTooLarge,
  ConfigError,
  MissingSeries,
};

const char* error_kind_name(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above.
// `value` holds an optional numeric payload (hit time for HitsSingularity,
// node count for BudgetExceeded, ...); NaN when unused.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double value = std::numeric_limits<double>::quiet_NaN());

  ErrorKind kind() const { return kind_; }
  double value() const { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

}  // namespace flatdio
