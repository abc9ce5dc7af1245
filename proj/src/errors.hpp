#pragma once

#include <stdexcept>
#include <string>

namespace coverimpact {

enum class ErrorCode {
  Param,
  Io,
  Decode,
  Csv,
  Config,
  Degenerate,
  Conditioning,
  Mismatch,
  Internal,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Param: return "param";
    case ErrorCode::Io: return "io";
    case ErrorCode::Decode: return "decode";
    case ErrorCode::Csv: return "csv";
    case ErrorCode::Config: return "config";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::Conditioning: return "conditioning";
    case ErrorCode::Mismatch: return "mismatch";
    case ErrorCode::Internal: return "internal";
  }
  return "internal";
}

// Single exception type carrying a coarse error class. The C API and the CLI
// map the class to status codes and to the `error: <code>: <detail>` line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace coverimpact
