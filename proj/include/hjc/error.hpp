#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hjc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown or ill-typed symbol reference.
class SymbolError : public Error {
 public:
  using Error::Error;
};

/// Numeric evaluation failure: unbound symbol, pole, or function domain violation.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// Syntax or validation failure while reading expressions or system files.
/// `offset` is a 1-based byte offset into the parsed string (0 when unknown);
/// `line` is a 1-based line number for system files (0 when not applicable).
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t offset, std::size_t line = 0)
      : Error(format(message, offset, line)), message_(std::move(message)),
        offset_(offset), line_(line) {}

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] const std::string& bare_message() const noexcept { return message_; }

 private:
  static std::string format(const std::string& m, std::size_t offset, std::size_t line) {
    std::string out = m;
    if (line > 0) out += " at line " + std::to_string(line);
    if (offset > 0) out += (line > 0 ? ", offset " : " at offset ") + std::to_string(offset);
    return out;
  }

  std::string message_;
  std::size_t offset_;
  std::size_t line_;
};

/// Structural failure of the constraint analysis (irregular Legendre map,
/// non-projectable constraint, closure loop not terminating, ...).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

}  // namespace hjc
