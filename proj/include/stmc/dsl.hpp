#pragma once

// Textual model syntax (.bsd files): constructor-call notation, `[a, b]`
// lists, `//` line comments.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "stmc/errors.hpp"
#include "stmc/invariant.hpp"

namespace stmc::dsl {

// 1-based position of the offending token.
struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct ParseError {
  SourceSpan span;
  std::string expected;
  std::string found;
};

std::string to_string(const ParseError& e);

using ParseResult = std::variant<Invariant, ParseError>;

// On success the model is normalized.
ParseResult parse_model(std::string_view src);

// Canonical form, two-space indentation, trailing newline. parse_model maps
// the output back to an equal term.
std::string print_model(const Invariant& m);

// Thrown by the convenience loaders below.
class ParseFailure : public Error {
 public:
  ParseFailure(std::string where, ParseError detail);
  const ParseError& detail() const { return detail_; }

 private:
  ParseError detail_;
};

Invariant parse_model_or_throw(std::string_view src, std::string_view where = "<input>");

// Throws std::runtime_error when the file cannot be read, ParseFailure when
// it does not parse.
Invariant load_model_file(const std::filesystem::path& path);

// Seconds since 00:00:00; fields are not range-checked here.
constexpr Tick clock_to_tick(int h, int m, int s) { return Tick{h} * 3600 + Tick{m} * 60 + s; }

// "HH:MM:SS" for ticks within one day, decimal otherwise.
std::string format_clock(Tick t);

// Accepts "HH:MM:SS" (range-checked like TStandardGMTDay) or a non-negative
// decimal tick count.
std::optional<Tick> parse_tick_literal(std::string_view text);

}  // namespace stmc::dsl
