#pragma once

#include <stdexcept>
#include <string>

namespace homebench {

// Contract violations are exceptions; expected failures (a primitive whose
// precondition does not hold, a verification finding) travel through report
// and outcome types instead.

struct UnknownIdError : std::runtime_error {
  explicit UnknownIdError(const std::string& id)
      : std::runtime_error("unknown id: " + id) {}
};

struct MalformedActionError : std::runtime_error {
  explicit MalformedActionError(const std::string& what)
      : std::runtime_error("malformed action: " + what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what)
      : std::runtime_error("parse error: " + what) {}
};

struct UnsatisfiableConstraintError : std::runtime_error {
  explicit UnsatisfiableConstraintError(const std::string& what)
      : std::runtime_error("unsatisfiable constraint: " + what) {}
};

struct GenerationExhaustedError : std::runtime_error {
  explicit GenerationExhaustedError(const std::string& what)
      : std::runtime_error("generation exhausted: " + what) {}
};

struct UnexpandableError : std::runtime_error {
  explicit UnexpandableError(const std::string& what)
      : std::runtime_error("unexpandable subgoal: " + what) {}
};

struct ExternalUnavailableError : std::runtime_error {
  explicit ExternalUnavailableError(const std::string& what)
      : std::runtime_error("external planner unavailable: " + what) {}
};

struct MalformedPlanError : std::runtime_error {
  explicit MalformedPlanError(const std::string& what)
      : std::runtime_error("malformed plan: " + what) {}
};

struct DivisionDomainError : std::runtime_error {
  explicit DivisionDomainError(const std::string& what)
      : std::runtime_error("division domain: " + what) {}
};

}  // namespace homebench
