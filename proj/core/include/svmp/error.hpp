#pragma once

#include <stdexcept>
#include <string>

namespace svmp {

enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kNonFinite,
  kEmptyInput,
  kInfeasibleLabeling,
  kDegenerateMargin,
  kBadMagic,
  kBadVersion,
  kTruncated,
  kNanEntry,
  kParse,
  kIo,
  kSolverFailure,
};

// Stable lower-case identifier, used in machine-readable CLI errors.
const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace svmp
