#pragma once

#include <stdexcept>
#include <string>

namespace csma {

enum class ErrorCode {
  malformed_document,
  duplicate_label,
  unknown_label,
  self_edge,
  empty_graph,
  too_many_links,
  too_large,
  infeasible_state,
  invalid_parameter,
  support_mismatch,
  invalid_point,
  inconsistent_snapshot,
  exhausted_draws,
  simultaneous_event,
  solver_failure,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_document: return "malformed-document";
    case ErrorCode::duplicate_label: return "duplicate-label";
    case ErrorCode::unknown_label: return "unknown-label";
    case ErrorCode::self_edge: return "self-edge";
    case ErrorCode::empty_graph: return "empty-graph";
    case ErrorCode::too_many_links: return "too-many-links";
    case ErrorCode::too_large: return "too-large";
    case ErrorCode::infeasible_state: return "infeasible";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::support_mismatch: return "support-mismatch";
    case ErrorCode::invalid_point: return "invalid-point";
    case ErrorCode::inconsistent_snapshot: return "inconsistent-snapshot";
    case ErrorCode::exhausted_draws: return "exhausted-draw-sequence";
    case ErrorCode::simultaneous_event: return "simultaneous-event";
    case ErrorCode::solver_failure: return "solver-failure";
  }
  return "unknown";
}

}  // namespace csma
