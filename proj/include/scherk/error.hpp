#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scherk {

enum class ErrorCode {
  NonIntegrable,
  NoConvergence,
  Divergent,
  SingularOnPath,
  SingularPoint,
  BadCount,
  NonpositiveLength,
  Degenerate,
  OutOfRange,
  CountMismatch,
  AtPrevertex,
  PathThroughPrevertex,
  InvalidConfiguration,
  CoincidentNodes,
  LeftSimplex,
  SingularJacobian,
  OrderViolation,
  EpsTooLarge,
  BranchInconsistency,
  SampleTooCloseToInterface,
  SingularSample,
  DegenerateTriangles,
  MeshTooSmall,
  NontransverseIntersection,
  IoError,
  Usage,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonIntegrable: return "NON_INTEGRABLE";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::Divergent: return "DIVERGENT";
    case ErrorCode::SingularOnPath: return "SINGULAR_ON_PATH";
    case ErrorCode::SingularPoint: return "SINGULAR_POINT";
    case ErrorCode::BadCount: return "BAD_COUNT";
    case ErrorCode::NonpositiveLength: return "NONPOSITIVE_LENGTH";
    case ErrorCode::Degenerate: return "DEGENERATE";
    case ErrorCode::OutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::CountMismatch: return "COUNT_MISMATCH";
    case ErrorCode::AtPrevertex: return "AT_PREVERTEX";
    case ErrorCode::PathThroughPrevertex: return "PATH_THROUGH_PREVERTEX";
    case ErrorCode::InvalidConfiguration: return "INVALID_CONFIGURATION";
    case ErrorCode::CoincidentNodes: return "COINCIDENT_NODES";
    case ErrorCode::LeftSimplex: return "LEFT_SIMPLEX";
    case ErrorCode::SingularJacobian: return "SINGULAR_JACOBIAN";
    case ErrorCode::OrderViolation: return "ORDER_VIOLATION";
    case ErrorCode::EpsTooLarge: return "EPS_TOO_LARGE";
    case ErrorCode::BranchInconsistency: return "BRANCH_INCONSISTENCY";
    case ErrorCode::SampleTooCloseToInterface: return "SAMPLE_TOO_CLOSE_TO_INTERFACE";
    case ErrorCode::SingularSample: return "SINGULAR_SAMPLE";
    case ErrorCode::DegenerateTriangles: return "DEGENERATE_TRIANGLES";
    case ErrorCode::MeshTooSmall: return "MESH_TOO_SMALL";
    case ErrorCode::NontransverseIntersection: return "NONTRANSVERSE_INTERSECTION";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::Usage: return "USAGE";
  }
  return "UNKNOWN";
}

/// Exception carrying one of the library's error codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scherk
