#include <doctest.h>

#include "stmc/dsl.hpp"
#include "stmc/scenario.hpp"
#include "support.hpp"

using namespace stmc;
using stmc::testing::Rng;

namespace {

Invariant parsed(std::string_view src) {
  auto r = dsl::parse_model(src);
  if (auto* e = std::get_if<dsl::ParseError>(&r)) FAIL(dsl::to_string(*e));
  return std::get<Invariant>(r);
}

dsl::ParseError failed(std::string_view src) {
  auto r = dsl::parse_model(src);
  REQUIRE(std::holds_alternative<dsl::ParseError>(r));
  return std::get<dsl::ParseError>(r);
}

// Span must address characters of the source (or the position just past it).
void check_span_in_bounds(std::string_view src, const dsl::SourceSpan& s) {
  int line = 1, col = 1;
  std::size_t offset = std::string_view::npos;
  for (std::size_t i = 0; i <= src.size(); ++i) {
    if (line == s.line && col == s.column) {
      offset = i;
      break;
    }
    if (i == src.size()) break;
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  REQUIRE_MESSAGE(offset != std::string_view::npos, "span " << s.line << ":" << s.column);
  CHECK(offset + static_cast<std::size_t>(s.length) <= src.size());
}

}  // namespace

TEST_CASE("edge atom") {
  CHECK(parsed(R"(Edge("ComHub","Robot1"))") == make_atom(Edge{"ComHub", "Robot1"}));
}

TEST_CASE("clock interval converts to ticks") {
  const Invariant m = parsed("TimeInterval(TStandardGMTDay(23,31,00),TStandardGMTDay(23,45,59))");
  const auto* i = m.atom_if<TimeInterval>();
  REQUIRE(i);
  // 23*3600 + 31*60 = 84660; 23*3600 + 45*60 + 59 = 85559.
  CHECK(i->from == 84660);
  CHECK(i->to == 85559);
  CHECK(i->clock);
  CHECK(dsl::format_clock(i->from) == "23:31:00");
  CHECK(dsl::format_clock(i->to) == "23:45:59");
}

TEST_CASE("clock conversion round-trips every second of the day") {
  for (Tick t = 0; t < kTicksPerDay; t += 7) {
    const auto back = dsl::parse_tick_literal(dsl::format_clock(t));
    REQUIRE(back);
    CHECK(*back == t);
  }
  CHECK(dsl::clock_to_tick(0, 0, 0) == 0);
  CHECK(dsl::clock_to_tick(23, 59, 59) == 86399);
  CHECK(dsl::format_clock(86400) == "86400");
}

TEST_CASE("tick literals") {
  CHECK(dsl::parse_tick_literal("23:50:00") == 85800);
  CHECK(dsl::parse_tick_literal("42") == 42);
  CHECK_FALSE(dsl::parse_tick_literal("24:00:00"));
  CHECK_FALSE(dsl::parse_tick_literal("12:60:00"));
  CHECK_FALSE(dsl::parse_tick_literal("-3"));
  CHECK_FALSE(dsl::parse_tick_literal("noon"));
  CHECK_FALSE(dsl::parse_tick_literal(""));
}

TEST_CASE("TRUE and FALSE") {
  CHECK(parsed("TRUE") == true_term());
  CHECK(parsed("TRUE()") == true_term());
  CHECK(parsed("FALSE") == false_term());
  CHECK(dsl::print_model(true_term()) == "TRUE\n");
}

TEST_CASE("box prints canonically") {
  CHECK(dsl::print_model(make_atom(OccupyBox{0, 0, 5, 5})) == "OccupyBox(0, 0, 5, 5)\n");
}

TEST_CASE("parse result is normalized") {
  CHECK(parsed("OccupyBox(5, 5, 0, 0)") == make_atom(OccupyBox{0, 0, 5, 5}));
  CHECK(parsed("BIGAND([BIGAND([Event(\"a\")]), Event(\"b\")])") ==
        make_big_and({make_atom(Event{"a"}), make_atom(Event{"b"})}));
}

TEST_CASE("all constructors parse") {
  const char* src = R"(
    // every constructor once
    BIGAND([
      AND(Owner("o"), NOT(Event("e"))),
      OR(Prob(0.25), ComponentState("idle")),
      IMPLIES(TimePoint(5), OccupyPoint(-1, 2)),
      IMPLIES(TimeStamp(TERTP("ConvAct", 3)), OccupyCircle(1, 2, 3)),
      Transition("s0", "go", "s1"),
      IMPLIES(TimePoint(TStandardGMTDay(1, 2, 3)), Edge("a", "b"))
    ]))";
  const Invariant m = parsed(src);
  const auto* b = m.term_if<BigAnd>();
  REQUIRE(b);
  CHECK(b->terms.size() == 6);
  CHECK(b->terms[3] == make_implies(make_atom(TimeStamp{EventRelativeTime{"ConvAct", 3}}),
                                    make_atom(OccupyCircle{1, 2, 3})));
  CHECK(b->terms[5].term_if<Implies>()->antecedent == make_atom(TimePoint{3723}));
}

TEST_CASE("string escapes") {
  CHECK(parsed(R"(Owner("a\"b\\c"))") == make_atom(Owner{"a\"b\\c"}));
  CHECK(dsl::print_model(make_atom(Owner{"a\"b\\c"})) == "Owner(\"a\\\"b\\\\c\")\n");
  const auto e = failed(R"(Owner("a\nb"))");
  CHECK(e.span.column == 9);
}

TEST_CASE("leading zeros are decimal") {
  CHECK(parsed("TimePoint(007)") == make_atom(TimePoint{7}));
}

TEST_CASE("parse errors carry spans") {
  SUBCASE("unknown constructor") {
    const auto e = failed("BIGAND([Edge(\"a\", \"b\"), Ede(\"c\", \"d\")])");
    CHECK(e.span.line == 1);
    CHECK(e.span.column == 25);
    CHECK(e.span.length == 3);
    CHECK(e.found.find("Ede") != std::string::npos);
  }
  SUBCASE("arity mismatch") {
    const auto e = failed("\n  OccupyBox(1, 2, 3)");
    CHECK(e.span.line == 2);
    CHECK(e.span.column == 3);
    CHECK(e.expected == "4 arguments for OccupyBox");
  }
  SUBCASE("clock fields out of range") {
    for (const char* src : {"TimePoint(TStandardGMTDay(24, 0, 0))", "TimePoint(TStandardGMTDay(1, 60, 0))",
                            "TimePoint(TStandardGMTDay(1, 0, 60))"}) {
      const auto e = failed(src);
      CHECK(e.span.line == 1);
      check_span_in_bounds(src, e.span);
    }
  }
  SUBCASE("malformed literal") {
    const auto e = failed("OccupyPoint(12x, 3)");
    CHECK(e.span.column == 13);
  }
  SUBCASE("BIGAND needs one list") {
    failed("BIGAND(Edge(\"a\", \"b\"))");
    failed("BIGAND([], [])");
  }
  SUBCASE("trailing input") {
    const auto e = failed("TRUE TRUE");
    CHECK(e.expected == "end of input");
    CHECK(e.span.column == 6);
  }
  SUBCASE("value checks") {
    failed("Prob(1.5)");
    failed("OccupyCircle(0, 0, -1)");
    failed("TimeInterval(5, 3)");
    failed("TimePoint(-1)");
  }
  SUBCASE("unterminated") {
    failed("Edge(\"a\", ");
    failed("\"abc");
    failed("");
  }
}

TEST_CASE("expected and found are never empty") {
  for (const char* src : {"", "(", ")", "Foo", "Edge(", "Edge(1, 2)", "BIGAND(", "[TRUE]", "TRUE,",
                          "OccupyBox(1,2,3,4,5)", "Prob(\"x\")", "TStandardGMTDay(1,2,3)"}) {
    const auto e = failed(src);
    CHECK_FALSE(e.expected.empty());
    CHECK_FALSE(e.found.empty());
    check_span_in_bounds(src, e.span);
  }
}

TEST_CASE("parsing random bytes terminates without crashing") {
  Rng rng(3);
  const std::string alphabet = "()[],\"\\ \n/TRUEFALSBIGNDOwnerEdgeOccupyBox0123456789-.:eE";
  int errors = 0;
  for (int i = 0; i < 3000; ++i) {
    std::string src;
    const auto n = rng.range(0, 60);
    for (std::int64_t k = 0; k < n; ++k) {
      src.push_back(rng.coin(0.8) ? alphabet[static_cast<std::size_t>(rng.range(0, alphabet.size() - 1))]
                                  : static_cast<char>(rng.range(0, 255)));
    }
    auto r = dsl::parse_model(src);
    if (auto* e = std::get_if<dsl::ParseError>(&r)) {
      ++errors;
      check_span_in_bounds(src, e->span);
    }
  }
  CHECK(errors > 0);
}

TEST_CASE("deep nesting is rejected, not overflowed") {
  std::string src;
  for (int i = 0; i < 5000; ++i) src += "NOT(";
  src += "TRUE";
  for (int i = 0; i < 5000; ++i) src += ")";
  failed(src);
}

TEST_CASE("printer layout") {
  const Invariant m = make_implies(make_atom(Owner{"G"}),
                                   make_big_and({make_atom(Edge{"a", "b"}),
                                                 make_implies(make_atom(TimeInterval{0, 59, true}),
                                                              make_atom(Edge{"c", "d"}))}));
  CHECK(dsl::print_model(m) == R"(IMPLIES(
  Owner("G"),
  BIGAND([
    Edge("a", "b"),
    IMPLIES(TimeInterval(TStandardGMTDay(00, 00, 00), TStandardGMTDay(00, 00, 59)), Edge("c", "d"))
  ])
)
)");
  CHECK(dsl::print_model(make_big_and({})) == "BIGAND([])\n");
  CHECK(dsl::print_model(make_atom(TimePoint{90000, true})) == "TimePoint(90000)\n");
  CHECK(dsl::print_model(make_atom(Prob{1.0})) == "Prob(1.0)\n");
}

TEST_CASE("round-trip on fixture models") {
  for (const char* name : {"comm_model.bsd", "site_graphs.bsd", "trajectory_default.bsd", "sensors_2x2.bsd"}) {
    INFO(name);
    const Invariant m = dsl::load_model_file(testing::data_path(name));
    CHECK(parsed(dsl::print_model(m)) == m);
    CHECK(dsl::print_model(parsed(dsl::print_model(m))) == dsl::print_model(m));
  }
}

TEST_CASE("round-trip on random terms") {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const Invariant m = normalize(testing::random_term(rng, 6));
    REQUIRE(testing::term_depth(m) <= 6);
    const Invariant back = parsed(dsl::print_model(m));
    CHECK(back == m);
  }
}

TEST_CASE("load_model_file errors") {
  CHECK_THROWS_AS(dsl::load_model_file("/nonexistent/model.bsd"), std::runtime_error);
  CHECK_THROWS_AS(dsl::parse_model_or_throw("Foo()", "inline"), dsl::ParseFailure);
  try {
    dsl::parse_model_or_throw("Foo()", "inline");
  } catch (const dsl::ParseFailure& e) {
    CHECK(std::string(e.what()).rfind("inline:1:1", 0) == 0);
    CHECK(e.detail().span.length == 3);
  }
}
