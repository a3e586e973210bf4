#pragma once

#include <stdexcept>
#include <string>

namespace slitflow {

/// Failure categories surfaced by the library.
enum class ErrorCode {
  CoincidentPoints,
  DomainExit,
  BoundaryInput,
  ParameterRange,
  Pole,
  ShapeViolation,
  StepDegeneration,
  Inconsistent,
  BranchObstruction,
  StepExplosion,
  ReversalInstability,
  SupportViolation,
  InverseFailure,
  Neutrality,
  BranchPoint,
  OutsideTriangle,
  Config,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace slitflow
