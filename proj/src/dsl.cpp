#include "stmc/dsl.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "stmc/detail/overloaded.hpp"

namespace stmc::dsl {

namespace {

using detail::Overloaded;

constexpr int kMaxDepth = 256;

enum class TokKind { Ident, Int, Real, String, LParen, RParen, LBracket, RBracket, Comma, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string_view text;  // raw lexeme
  std::string value;      // decoded string literal
  SourceSpan span;
};

struct Failure {
  ParseError error;
};

[[noreturn]] void fail(SourceSpan span, std::string expected, std::string found) {
  throw Failure{ParseError{span, std::move(expected), std::move(found)}};
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokKind::End:
      return "end of input";
    case TokKind::String:
      return fmt::format("string {}", t.text);
    default:
      return fmt::format("'{}'", t.text);
  }
}

bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_trivia();
    Token t;
    t.span = SourceSpan{line_, col_, 0};
    if (pos_ >= src_.size()) {
      t.kind = TokKind::End;
      return t;
    }
    const std::size_t start = pos_;
    const char c = src_[pos_];
    auto single = [&](TokKind k) {
      advance();
      return finish(t, k, start);
    };
    switch (c) {
      case '(':
        return single(TokKind::LParen);
      case ')':
        return single(TokKind::RParen);
      case '[':
        return single(TokKind::LBracket);
      case ']':
        return single(TokKind::RBracket);
      case ',':
        return single(TokKind::Comma);
      case '"':
        return lex_string(t, start);
      default:
        break;
    }
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
      return finish(t, TokKind::Ident, start);
    }
    if (is_digit(c) || (c == '-' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      return lex_number(t, start);
    }
    advance();
    t.span.length = 1;
    fail(t.span, "term", fmt::format("unexpected character 0x{:02x}",
                                     static_cast<unsigned>(static_cast<unsigned char>(c))));
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token finish(Token& t, TokKind k, std::size_t start) {
    t.kind = k;
    t.text = src_.substr(start, pos_ - start);
    t.span.length = static_cast<int>(pos_ - start);
    return t;
  }

  Token lex_string(Token& t, std::size_t start) {
    advance();  // opening quote
    std::string value;
    while (true) {
      if (pos_ >= src_.size()) {
        t.span.length = static_cast<int>(pos_ - start);
        fail(t.span, "closing '\"'", "end of input");
      }
      const char c = src_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        if (pos_ + 1 < src_.size() && (src_[pos_ + 1] == '"' || src_[pos_ + 1] == '\\')) {
          value.push_back(src_[pos_ + 1]);
          advance();
          advance();
          continue;
        }
        SourceSpan at{line_, col_, pos_ + 1 < src_.size() ? 2 : 1};
        fail(at, "escape \\\" or \\\\", "malformed string escape");
      }
      value.push_back(c);
      advance();
    }
    finish(t, TokKind::String, start);
    t.value = std::move(value);
    return t;
  }

  Token lex_number(Token& t, std::size_t start) {
    if (src_[pos_] == '-') advance();
    while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    bool real = false;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      real = true;
      advance();
      if (pos_ >= src_.size() || !is_digit(src_[pos_])) bad_literal(t, start);
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      real = true;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ >= src_.size() || !is_digit(src_[pos_])) bad_literal(t, start);
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    }
    if (pos_ < src_.size() && (is_ident_char(src_[pos_]) || src_[pos_] == '.')) bad_literal(t, start);
    return finish(t, real ? TokKind::Real : TokKind::Int, start);
  }

  [[noreturn]] void bad_literal(Token& t, std::size_t start) {
    while (pos_ < src_.size() && (is_ident_char(src_[pos_]) || src_[pos_] == '.')) advance();
    t.span.length = static_cast<int>(pos_ - start);
    fail(t.span, "number", fmt::format("malformed literal '{}'", src_.substr(start, pos_ - start)));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Values an argument position can hold.
struct ClockValue {
  Tick tick;
};
using ArgValue = std::variant<Invariant, std::int64_t, double, std::string, std::vector<Invariant>,
                              ClockValue, EventRelativeTime>;

struct Arg {
  ArgValue value;
  SourceSpan span;
  std::string spelled;
};

std::string kind_name(const ArgValue& v) {
  return std::visit(Overloaded{
                        [](const Invariant&) { return std::string("term"); },
                        [](std::int64_t) { return std::string("integer"); },
                        [](double) { return std::string("real"); },
                        [](const std::string&) { return std::string("string"); },
                        [](const std::vector<Invariant>&) { return std::string("list"); },
                        [](const ClockValue&) { return std::string("TStandardGMTDay"); },
                        [](const EventRelativeTime&) { return std::string("TERTP"); },
                    },
                    v);
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { cur_ = lexer_.next(); }

  Invariant parse_all() {
    Arg a = parse_arg(0);
    Invariant m = expect_term(a);
    if (cur_.kind != TokKind::End) fail(cur_.span, "end of input", describe(cur_));
    return m;
  }

 private:
  void bump() { cur_ = lexer_.next(); }

  void expect(TokKind k, const char* what) {
    if (cur_.kind != k) fail(cur_.span, what, describe(cur_));
    bump();
  }

  static Invariant expect_term(const Arg& a) {
    if (const auto* t = std::get_if<Invariant>(&a.value)) return *t;
    fail(a.span, "term", fmt::format("{} {}", kind_name(a.value), a.spelled));
  }

  static std::int64_t expect_int(const Arg& a) {
    if (const auto* v = std::get_if<std::int64_t>(&a.value)) return *v;
    fail(a.span, "integer", fmt::format("{} {}", kind_name(a.value), a.spelled));
  }

  static Tick expect_tick(const Arg& a) {
    if (const auto* c = std::get_if<ClockValue>(&a.value)) return c->tick;
    if (const auto* v = std::get_if<std::int64_t>(&a.value)) {
      if (*v < 0) fail(a.span, "non-negative tick", a.spelled);
      return *v;
    }
    fail(a.span, "tick (integer or TStandardGMTDay)",
         fmt::format("{} {}", kind_name(a.value), a.spelled));
  }

  static std::string expect_string(const Arg& a) {
    if (const auto* s = std::get_if<std::string>(&a.value)) return *s;
    fail(a.span, "string", fmt::format("{} {}", kind_name(a.value), a.spelled));
  }

  static bool is_clock(const Arg& a) { return std::holds_alternative<ClockValue>(a.value); }

  Arg parse_arg(int depth) {
    if (depth > kMaxDepth) fail(cur_.span, "shallower nesting", "nesting deeper than 256 levels");
    Token t = cur_;
    switch (t.kind) {
      case TokKind::Int: {
        bump();
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || p != t.text.data() + t.text.size()) {
          fail(t.span, "64-bit integer", fmt::format("malformed literal '{}'", t.text));
        }
        return Arg{v, t.span, std::string(t.text)};
      }
      case TokKind::Real: {
        bump();
        double v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || p != t.text.data() + t.text.size()) {
          fail(t.span, "real number", fmt::format("malformed literal '{}'", t.text));
        }
        return Arg{v, t.span, std::string(t.text)};
      }
      case TokKind::String:
        bump();
        return Arg{t.value, t.span, std::string(t.text)};
      case TokKind::LBracket: {
        bump();
        std::vector<Invariant> items;
        if (cur_.kind != TokKind::RBracket) {
          while (true) {
            Arg item = parse_arg(depth + 1);
            items.push_back(expect_term(item));
            if (cur_.kind == TokKind::Comma) {
              bump();
              continue;
            }
            break;
          }
        }
        expect(TokKind::RBracket, "',' or ']'");
        return Arg{std::move(items), t.span, "[...]"};
      }
      case TokKind::Ident:
        return parse_ctor(depth);
      default:
        fail(t.span, "term", describe(t));
    }
  }

  Arg parse_ctor(int depth) {
    Token name = cur_;
    bump();
    const std::string_view n = name.text;
    const std::string spelled(n);

    if (n == "TRUE" || n == "FALSE") {
      if (cur_.kind == TokKind::LParen) {  // TRUE() is accepted as well
        bump();
        expect(TokKind::RParen, "')'");
      }
      return Arg{n == "TRUE" ? true_term() : false_term(), name.span, spelled};
    }

    if (!known_ctor(n)) fail(name.span, "constructor", fmt::format("unknown constructor '{}'", n));
    expect(TokKind::LParen, "'('");
    std::vector<Arg> args;
    if (cur_.kind != TokKind::RParen) {
      while (true) {
        args.push_back(parse_arg(depth + 1));
        if (cur_.kind == TokKind::Comma) {
          bump();
          continue;
        }
        break;
      }
    }
    expect(TokKind::RParen, "',' or ')'");

    auto arity = [&](std::size_t want) {
      if (args.size() != want) {
        fail(name.span, fmt::format("{} argument{} for {}", want, want == 1 ? "" : "s", n),
             fmt::format("{} argument{}", args.size(), args.size() == 1 ? "" : "s"));
      }
    };
    auto term = [&](AtomValue a) { return Arg{make_atom(std::move(a)), name.span, spelled}; };

    if (n == "AND" || n == "OR" || n == "IMPLIES") {
      arity(2);
      Invariant l = expect_term(args[0]);
      Invariant r = expect_term(args[1]);
      Invariant out = n == "AND"  ? make_and(std::move(l), std::move(r))
                      : n == "OR" ? make_or(std::move(l), std::move(r))
                                  : make_implies(std::move(l), std::move(r));
      return Arg{std::move(out), name.span, spelled};
    }
    if (n == "NOT") {
      arity(1);
      return Arg{make_not(expect_term(args[0])), name.span, spelled};
    }
    if (n == "BIGAND") {
      arity(1);
      auto* list = std::get_if<std::vector<Invariant>>(&args[0].value);
      if (!list) {
        fail(args[0].span, "list", fmt::format("{} {}", kind_name(args[0].value), args[0].spelled));
      }
      return Arg{make_big_and(std::move(*list)), name.span, spelled};
    }
    if (n == "TStandardGMTDay") {
      arity(3);
      const std::int64_t limits[3] = {23, 59, 59};
      const char* fields[3] = {"hour 0..23", "minute 0..59", "second 0..59"};
      std::int64_t v[3];
      for (int i = 0; i < 3; ++i) {
        v[i] = expect_int(args[i]);
        if (v[i] < 0 || v[i] > limits[i]) fail(args[i].span, fields[i], args[i].spelled);
      }
      return Arg{ClockValue{clock_to_tick(static_cast<int>(v[0]), static_cast<int>(v[1]),
                                          static_cast<int>(v[2]))},
                 name.span, spelled};
    }
    if (n == "TERTP") {
      arity(2);
      std::string ev = expect_string(args[0]);
      Tick off = expect_tick(args[1]);
      return Arg{EventRelativeTime{std::move(ev), off}, name.span, spelled};
    }
    if (n == "TimePoint") {
      arity(1);
      return term(TimePoint{expect_tick(args[0]), is_clock(args[0])});
    }
    if (n == "TimeInterval") {
      arity(2);
      Tick from = expect_tick(args[0]);
      Tick to = expect_tick(args[1]);
      if (from > to) fail(args[1].span, "interval end >= start", args[1].spelled);
      return term(TimeInterval{from, to, is_clock(args[0]) || is_clock(args[1])});
    }
    if (n == "TimeStamp") {
      arity(1);
      auto* ert = std::get_if<EventRelativeTime>(&args[0].value);
      if (!ert) {
        fail(args[0].span, "TERTP(event, offset)",
             fmt::format("{} {}", kind_name(args[0].value), args[0].spelled));
      }
      return term(TimeStamp{*ert});
    }
    if (n == "Event") {
      arity(1);
      return term(Event{expect_string(args[0])});
    }
    if (n == "Owner") {
      arity(1);
      return term(Owner{expect_string(args[0])});
    }
    if (n == "ComponentState") {
      arity(1);
      return term(ComponentState{expect_string(args[0])});
    }
    if (n == "Prob") {
      arity(1);
      double p = 0;
      if (const auto* d = std::get_if<double>(&args[0].value)) {
        p = *d;
      } else if (const auto* i = std::get_if<std::int64_t>(&args[0].value)) {
        p = static_cast<double>(*i);
      } else {
        fail(args[0].span, "probability", fmt::format("{} {}", kind_name(args[0].value), args[0].spelled));
      }
      if (!(p >= 0.0 && p <= 1.0)) fail(args[0].span, "probability in [0, 1]", args[0].spelled);
      return term(Prob{p});
    }
    if (n == "OccupyPoint") {
      arity(2);
      return term(OccupyPoint{expect_int(args[0]), expect_int(args[1])});
    }
    if (n == "OccupyBox") {
      arity(4);
      return term(OccupyBox{expect_int(args[0]), expect_int(args[1]), expect_int(args[2]),
                            expect_int(args[3])});
    }
    if (n == "OccupyCircle") {
      arity(3);
      std::int64_t r = expect_int(args[2]);
      if (r < 0) fail(args[2].span, "non-negative radius", args[2].spelled);
      return term(OccupyCircle{expect_int(args[0]), expect_int(args[1]), r});
    }
    if (n == "Edge") {
      arity(2);
      return term(Edge{expect_string(args[0]), expect_string(args[1])});
    }
    // Transition
    arity(3);
    return term(Transition{expect_string(args[0]), expect_string(args[1]), expect_string(args[2])});
  }

  static bool known_ctor(std::string_view n) {
    static constexpr std::string_view kCtors[] = {
        "AND",           "OR",         "NOT",      "IMPLIES",   "BIGAND",
        "TimePoint",     "TimeInterval", "TimeStamp", "TERTP",   "Event",
        "Owner",         "Prob",       "ComponentState", "OccupyPoint", "OccupyBox",
        "OccupyCircle",  "Edge",       "Transition", "TStandardGMTDay"};
    for (auto c : kCtors) {
      if (c == n) return true;
    }
    return false;
  }

  Lexer lexer_;
  Token cur_;
};

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string print_tick(Tick t, bool clock) {
  if (clock && t >= 0 && t < kTicksPerDay) {
    return fmt::format("TStandardGMTDay({:02}, {:02}, {:02})", t / 3600, (t / 60) % 60, t % 60);
  }
  return std::to_string(t);
}

std::string print_real(double p) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string print_atom(const AtomValue& a) {
  return std::visit(
      Overloaded{
          [](const TimePoint& x) { return fmt::format("TimePoint({})", print_tick(x.t, x.clock)); },
          [](const TimeInterval& x) {
            const bool clock = x.clock && x.to < kTicksPerDay;
            return fmt::format("TimeInterval({}, {})", print_tick(x.from, clock),
                               print_tick(x.to, clock));
          },
          [](const TimeStamp& x) {
            return fmt::format("TimeStamp(TERTP({}, {}))", quote(x.ert.event), x.ert.offset);
          },
          [](const Event& x) { return fmt::format("Event({})", quote(x.name)); },
          [](const Owner& x) { return fmt::format("Owner({})", quote(x.name)); },
          [](const Prob& x) { return fmt::format("Prob({})", print_real(x.p)); },
          [](const ComponentState& x) { return fmt::format("ComponentState({})", quote(x.state)); },
          [](const OccupyPoint& x) { return fmt::format("OccupyPoint({}, {})", x.x, x.y); },
          [](const OccupyBox& x) {
            return fmt::format("OccupyBox({}, {}, {}, {})", x.x1, x.y1, x.x2, x.y2);
          },
          [](const OccupyCircle& x) {
            return fmt::format("OccupyCircle({}, {}, {})", x.cx, x.cy, x.radius);
          },
          [](const Edge& x) { return fmt::format("Edge({}, {})", quote(x.source), quote(x.target)); },
          [](const Transition& x) {
            return fmt::format("Transition({}, {}, {})", quote(x.source), quote(x.event),
                               quote(x.target));
          },
          [](const TrueAtom&) { return std::string("TRUE"); },
          [](const FalseAtom&) { return std::string("FALSE"); },
      },
      a);
}

void print_term(const Invariant& m, int indent, std::string& out);

void print_compound(std::string_view name, std::initializer_list<const Invariant*> kids,
                    int indent, std::string& out) {
  bool flat = true;
  for (const auto* k : kids) flat = flat && k->as_atom() != nullptr;
  out += name;
  out += '(';
  if (flat) {
    bool first = true;
    for (const auto* k : kids) {
      if (!first) out += ", ";
      first = false;
      out += print_atom(*k->as_atom());
    }
    out += ')';
    return;
  }
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  bool first = true;
  for (const auto* k : kids) {
    out += first ? "\n" : ",\n";
    first = false;
    out += pad;
    print_term(*k, indent + 2, out);
  }
  out += '\n';
  out.append(static_cast<std::size_t>(indent), ' ');
  out += ')';
}

void print_term(const Invariant& m, int indent, std::string& out) {
  std::visit(Overloaded{
                 [&](const And& x) { print_compound("AND", {&x.left, &x.right}, indent, out); },
                 [&](const Or& x) { print_compound("OR", {&x.left, &x.right}, indent, out); },
                 [&](const Not& x) { print_compound("NOT", {&x.term}, indent, out); },
                 [&](const Implies& x) {
                   print_compound("IMPLIES", {&x.antecedent, &x.consequent}, indent, out);
                 },
                 [&](const BigAnd& x) {
                   if (x.terms.empty()) {
                     out += "BIGAND([])";
                     return;
                   }
                   const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
                   out += "BIGAND([";
                   bool first = true;
                   for (const auto& t : x.terms) {
                     out += first ? "\n" : ",\n";
                     first = false;
                     out += pad;
                     print_term(t, indent + 2, out);
                   }
                   out += '\n';
                   out.append(static_cast<std::size_t>(indent), ' ');
                   out += "])";
                 },
                 [&](const AtomValue& a) { out += print_atom(a); },
             },
             m.node().value);
}

}  // namespace

std::string to_string(const ParseError& e) {
  return fmt::format("{}:{}: expected {}, found {}", e.span.line, e.span.column, e.expected,
                     e.found);
}

ParseResult parse_model(std::string_view src) {
  try {
    Parser p(src);
    return normalize(p.parse_all());
  } catch (const Failure& f) {
    return f.error;
  }
}

std::string print_model(const Invariant& m) {
  std::string out;
  print_term(m, 0, out);
  out += '\n';
  return out;
}

ParseFailure::ParseFailure(std::string where, ParseError detail)
    : Error(fmt::format("{}:{}", where, to_string(detail))), detail_(std::move(detail)) {}

Invariant parse_model_or_throw(std::string_view src, std::string_view where) {
  auto r = parse_model(src);
  if (auto* e = std::get_if<ParseError>(&r)) throw ParseFailure(std::string(where), *e);
  return std::get<Invariant>(std::move(r));
}

Invariant load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_or_throw(ss.str(), path.string());
}

std::string format_clock(Tick t) {
  if (t >= 0 && t < kTicksPerDay) {
    return fmt::format("{:02}:{:02}:{:02}", t / 3600, (t / 60) % 60, t % 60);
  }
  return std::to_string(t);
}

std::optional<Tick> parse_tick_literal(std::string_view text) {
  auto parse_uint = [](std::string_view s) -> std::optional<std::int64_t> {
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v < 0) return std::nullopt;
    return v;
  };
  const auto c1 = text.find(':');
  if (c1 == std::string_view::npos) return parse_uint(text);
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) return std::nullopt;
  auto h = parse_uint(text.substr(0, c1));
  auto m = parse_uint(text.substr(c1 + 1, c2 - c1 - 1));
  auto s = parse_uint(text.substr(c2 + 1));
  if (!h || !m || !s || *h > 23 || *m > 59 || *s > 59) return std::nullopt;
  return clock_to_tick(static_cast<int>(*h), static_cast<int>(*m), static_cast<int>(*s));
}

}  // namespace stmc::dsl
