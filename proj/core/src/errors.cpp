#include "vppfreq/errors.hpp"

namespace vppfreq {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Overdamped: return "Overdamped";
    case ErrorCode::NeverActivates: return "NeverActivates";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DeadbandExceedsLimit: return "DeadbandExceedsLimit";
    case ErrorCode::Unsatisfiable: return "Unsatisfiable";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::EmptyFront: return "EmptyFront";
    case ErrorCode::MissingCompensation: return "MissingCompensation";
  }
  return "Unknown";
}

}  // namespace vppfreq
