#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace madtn {

enum class ErrorCode {
  UnknownTimepoint,
  InvertedBounds,
  InvalidBounds,
  InconsistentNetwork,
  MissingTimepoint,
  NegativeDuration,
  EmptyPetal,
  InvalidDaisy,
  MalformedOrdering,
  CyclicPrecedence,
  NoCapableAgent,
  UnassignedPetal,
  InconsistentOrdering,
  Deadlock,
  CoverageMismatch,
  UnknownAgent,
  AgentCount,
  NonHandoffKind,
  SyntaxError,
  SchemaViolation,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownTimepoint: return "unknown-timepoint";
    case ErrorCode::InvertedBounds: return "inverted-bounds";
    case ErrorCode::InvalidBounds: return "invalid-bounds";
    case ErrorCode::InconsistentNetwork: return "inconsistent-network";
    case ErrorCode::MissingTimepoint: return "missing-timepoint";
    case ErrorCode::NegativeDuration: return "negative-duration";
    case ErrorCode::EmptyPetal: return "empty-petal";
    case ErrorCode::InvalidDaisy: return "invalid-daisy";
    case ErrorCode::MalformedOrdering: return "malformed-ordering";
    case ErrorCode::CyclicPrecedence: return "cyclic-precedence";
    case ErrorCode::NoCapableAgent: return "no-capable-agent";
    case ErrorCode::UnassignedPetal: return "unassigned-petal";
    case ErrorCode::InconsistentOrdering: return "inconsistent-ordering";
    case ErrorCode::Deadlock: return "deadlock";
    case ErrorCode::CoverageMismatch: return "coverage-mismatch";
    case ErrorCode::UnknownAgent: return "unknown-agent";
    case ErrorCode::AgentCount: return "agent-count";
    case ErrorCode::NonHandoffKind: return "non-handoff-kind";
    case ErrorCode::SyntaxError: return "syntax-error";
    case ErrorCode::SchemaViolation: return "schema-violation";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace madtn
