#include "svmp/error.hpp"

namespace svmp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kNonFinite: return "non_finite";
    case ErrorKind::kEmptyInput: return "empty_input";
    case ErrorKind::kInfeasibleLabeling: return "infeasible_labeling";
    case ErrorKind::kDegenerateMargin: return "degenerate_margin";
    case ErrorKind::kBadMagic: return "bad_magic";
    case ErrorKind::kBadVersion: return "bad_version";
    case ErrorKind::kTruncated: return "truncated_payload";
    case ErrorKind::kNanEntry: return "nan_entry";
    case ErrorKind::kParse: return "parse_error";
    case ErrorKind::kIo: return "io_error";
    case ErrorKind::kSolverFailure: return "solver_failure";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

}  // namespace svmp
