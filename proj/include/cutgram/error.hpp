#pragma once

#include <stdexcept>
#include <string>

namespace cutgram {

enum class ErrorKind {
  DuplicateRuleId,
  MalformedLine,
  ArityMismatch,
  UnknownRuleId,
  CategoryMismatch,
  RootHasNoParent,
  PathNotInIndex,
  ChunkExplosion,
  IterationLimitExceeded,
  InvalidArgument,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateRuleId: return "DuplicateRuleId";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::UnknownRuleId: return "UnknownRuleId";
    case ErrorKind::CategoryMismatch: return "CategoryMismatch";
    case ErrorKind::RootHasNoParent: return "RootHasNoParent";
    case ErrorKind::PathNotInIndex: return "PathNotInIndex";
    case ErrorKind::ChunkExplosion: return "ChunkExplosion";
    case ErrorKind::IterationLimitExceeded: return "IterationLimitExceeded";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library. `line()` is 0 when the error is not
/// tied to a position in an input file.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, int line = 0)
      : std::runtime_error(format(kind, message, line)), kind_(kind), line_(line), message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  static std::string format(ErrorKind kind, const std::string& message, int line) {
    std::string out = to_string(kind);
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    out += ": ";
    out += message;
    return out;
  }

  ErrorKind kind_;
  int line_;
  std::string message_;
};

}  // namespace cutgram
