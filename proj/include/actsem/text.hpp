#pragma once

// Small lexical helpers shared by the trace, clause and theory readers.

#include <actsem/error.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace actsem::text {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0 into 0
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error(ErrorCode::Range, "cannot format number");
  return std::string(buf.data(), end);
}

inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

inline bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}

inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  for (char c : s)
    if (!is_ident_char(c)) return false;
  return true;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) s.remove_suffix(1);
  return s;
}

/// Forward-only reader over a string_view; errors carry the caller's line.
class Cursor {
 public:
  explicit Cursor(std::string_view src, std::size_t line = 0) : src_(src), line_(line) {}

  bool done() const { return pos_ >= src_.size(); }
  char peek() const { return done() ? '\0' : src_[pos_]; }
  std::size_t position() const { return pos_; }
  std::string_view rest() const { return src_.substr(pos_); }
  std::size_t line() const { return line_; }

  void skip_space() {
    while (!done() && std::isspace(static_cast<unsigned char>(src_[pos_])) != 0) ++pos_;
  }

  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  /// Reads up to (not including) the first character in `stops`.
  std::string_view until_any(std::string_view stops) {
    std::size_t start = pos_;
    while (!done() && stops.find(src_[pos_]) == std::string_view::npos) ++pos_;
    return src_.substr(start, pos_ - start);
  }

  std::string_view identifier() {
    std::size_t start = pos_;
    if (done() || !is_ident_start(src_[pos_])) fail("expected identifier");
    while (!done() && is_ident_char(src_[pos_])) ++pos_;
    return src_.substr(start, pos_ - start);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::Parse, what + " near '" + std::string(src_.substr(pos_, 24)) + "'", line_);
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace actsem::text
