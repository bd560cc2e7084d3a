#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace smartml {

struct SourcePos {
  int line = 0;
  int col = 0;

  bool valid() const { return line > 0; }
  std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

/// Error raised by the front end (lexer/parser). Carries the position and,
/// for parse errors, the set of tokens that would have been accepted.
class ParseError : public std::runtime_error {
public:
  ParseError(SourcePos pos, std::string message, std::vector<std::string> expected = {})
      : std::runtime_error(format(pos, message, expected)),
        pos_(pos),
        message_(std::move(message)),
        expected_(std::move(expected)) {}

  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }
  const std::vector<std::string>& expected() const { return expected_; }

private:
  static std::string format(SourcePos pos, const std::string& message,
                            const std::vector<std::string>& expected) {
    std::string out = pos.str() + ": " + message;
    if (!expected.empty()) {
      out += " (expected ";
      for (size_t i = 0; i < expected.size(); ++i) {
        if (i) out += ", ";
        out += expected[i];
      }
      out += ")";
    }
    return out;
  }

  SourcePos pos_;
  std::string message_;
  std::vector<std::string> expected_;
};

/// Name-resolution failure: unknown or duplicate names, cyclic inheritance,
/// arity mismatches.
class NameError : public std::runtime_error {
public:
  NameError(SourcePos pos, std::string message)
      : std::runtime_error(pos.valid() ? pos.str() + ": " + message : message),
        pos_(pos),
        message_(std::move(message)) {}

  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }

private:
  SourcePos pos_;
  std::string message_;
};

}  // namespace smartml
