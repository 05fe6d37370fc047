#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace actsem {

enum class ErrorCode {
  Parse,
  Range,
  Empty,
  Schema,
  Order,
  Dangling,
  Duplicate,
  Mismatch,
  Simulation,
  NotFound,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Range: return "range";
    case ErrorCode::Empty: return "empty";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::Order: return "order";
    case ErrorCode::Dangling: return "dangling";
    case ErrorCode::Duplicate: return "duplicate";
    case ErrorCode::Mismatch: return "mismatch";
    case ErrorCode::Simulation: return "simulation";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

/// Single exception type for the library. `line()` is 1-based and 0 when the
/// error is not tied to a position in an input text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t line = 0)
      : std::runtime_error(compose(code, message, line)), code_(code), line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string compose(ErrorCode code, const std::string& message, std::size_t line) {
    std::string out(to_string(code));
    out += " error";
    if (line != 0) {
      out += " at line ";
      out += std::to_string(line);
    }
    out += ": ";
    out += message;
    return out;
  }

  ErrorCode code_;
  std::size_t line_;
};

}  // namespace actsem
