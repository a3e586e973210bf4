#include "slitflow/error.hpp"

namespace slitflow {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CoincidentPoints: return "coincident-points";
    case ErrorCode::DomainExit: return "domain-exit";
    case ErrorCode::BoundaryInput: return "boundary-input";
    case ErrorCode::ParameterRange: return "parameter-range";
    case ErrorCode::Pole: return "pole";
    case ErrorCode::ShapeViolation: return "shape-violation";
    case ErrorCode::StepDegeneration: return "step-degeneration";
    case ErrorCode::Inconsistent: return "inconsistent";
    case ErrorCode::BranchObstruction: return "branch-obstruction";
    case ErrorCode::StepExplosion: return "step-explosion";
    case ErrorCode::ReversalInstability: return "reversal-instability";
    case ErrorCode::SupportViolation: return "support-violation";
    case ErrorCode::InverseFailure: return "inverse-failure";
    case ErrorCode::Neutrality: return "neutrality-violation";
    case ErrorCode::BranchPoint: return "branch-point";
    case ErrorCode::OutsideTriangle: return "outside-triangle";
    case ErrorCode::Config: return "config";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace slitflow
