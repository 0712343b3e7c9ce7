#include "schlafli/error.hpp"

namespace schlafli {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ModelViolation: return "ModelViolation";
    case ErrorKind::NotJoinable: return "NotJoinable";
    case ErrorKind::ChartUnbounded: return "ChartUnbounded";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DegenerateRidge: return "DegenerateRidge";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::NonSimplex: return "NonSimplex";
    case ErrorKind::ZeroCurvature: return "ZeroCurvature";
    case ErrorKind::RigidStart: return "RigidStart";
    case ErrorKind::ProjectionDiverged: return "ProjectionDiverged";
    case ErrorKind::NotImmersed: return "NotImmersed";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotStarShaped: return "NotStarShaped";
    case ErrorKind::NotNormalGenerator: return "NotNormalGenerator";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::FocalCrossing: return "FocalCrossing";
    case ErrorKind::NotConvex: return "NotConvex";
    case ErrorKind::EstimateUnavailable: return "EstimateUnavailable";
    case ErrorKind::NoMatchingSphere: return "NoMatchingSphere";
    case ErrorKind::NonInjectiveSweep: return "NonInjectiveSweep";
    case ErrorKind::NonPositiveWarp: return "NonPositiveWarp";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::SceneError: return "SceneError";
  }
  return "Unknown";
}

}  // namespace schlafli
