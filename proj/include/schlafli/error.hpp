#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace schlafli {

enum class ErrorKind {
  ModelViolation,
  NotJoinable,
  ChartUnbounded,
  OutOfRange,
  DegenerateRidge,
  NotClosed,
  NonSimplex,
  ZeroCurvature,
  RigidStart,
  ProjectionDiverged,
  NotImmersed,
  NoConvergence,
  NotStarShaped,
  NotNormalGenerator,
  DimensionMismatch,
  FocalCrossing,
  NotConvex,
  EstimateUnavailable,
  NoMatchingSphere,
  NonInjectiveSweep,
  NonPositiveWarp,
  SyntaxError,
  UnknownIdentifier,
  DomainError,
  SceneError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` identifies the failure.
/// Parser errors also carry a 1-based source position.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        line_(line),
        column_(column) {}

  ErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  int line_;
  int column_;
};

}  // namespace schlafli
