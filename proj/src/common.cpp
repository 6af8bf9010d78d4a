#include "exclab/common.hpp"

namespace exclab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::coincident_points: return "coincident_points";
    case ErrorCode::domain: return "domain";
    case ErrorCode::nonconvergence: return "nonconvergence";
    case ErrorCode::rejection_budget: return "rejection_budget";
    case ErrorCode::degenerate_map: return "degenerate_map";
    case ErrorCode::too_wide: return "too_wide";
    case ErrorCode::general_position: return "general_position";
    case ErrorCode::resolution: return "resolution";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::insufficient_hits: return "insufficient_hits";
    case ErrorCode::starved_bins: return "starved_bins";
    case ErrorCode::size: return "size";
    case ErrorCode::inconsistent_arrangement: return "inconsistent_arrangement";
    case ErrorCode::config: return "config";
    case ErrorCode::digest_mismatch: return "digest_mismatch";
  }
  return "unknown";
}

}  // namespace exclab
