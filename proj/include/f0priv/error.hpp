#pragma once

#include <stdexcept>
#include <string>

namespace f0priv {

enum class ErrorKind {
  kNoVoicedFrames,
  kInvalidArgument,
  kParse,
  kIo,
  kUnsupportedCodec,
  kTruncated,
  kEmpty,
  kNoOverlap,
  kAbsentStatistics,
  kCorpus,
};

/// Thrown by every library operation that can fail; `kind()` lets callers map
/// failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace f0priv
