#include "stmc/temporal.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "stmc/detail/overloaded.hpp"
#include "stmc/errors.hpp"
#include "stmc/geometry.hpp"

namespace stmc::temporal {

namespace {

using detail::Overloaded;

bool is_fact(const AtomValue& a) { return is_occupancy_atom(a) || std::holds_alternative<Edge>(a); }

bool contains_fact(const Invariant& m) {
  bool found = false;
  for_each_atom(m, [&](const AtomValue& a) { found = found || is_fact(a); });
  return found;
}

struct Context {
  std::optional<TimeGuard> time;
  std::optional<std::string> owner;
};

// Returns false when the antecedent can never hold (FALSE conjunct).
bool read_guard(const Invariant& a, std::optional<TimeGuard>& time, std::optional<std::string>& owner) {
  if (const auto* atom = a.as_atom()) {
    return std::visit(
        Overloaded{
            [&](const Owner& o) {
              owner = o.name;
              return true;
            },
            [&](const TrueAtom&) { return true; },
            [&](const FalseAtom&) { return false; },
            [&](const auto& other) -> bool {
              using T = std::decay_t<decltype(other)>;
              if constexpr (std::is_same_v<T, TimePoint> || std::is_same_v<T, TimeInterval> ||
                            std::is_same_v<T, TimeStamp>) {
                if (time) throw UnsupportedFragment("more than one time guard in one antecedent");
                time = other;
                return true;
              } else {
                throw UnsupportedFragment("guard is not a time, owner or TRUE atom");
              }
            },
        },
        *atom);
  }
  if (const auto* c = a.term_if<And>()) {
    const bool l = read_guard(c->left, time, owner);
    const bool r = read_guard(c->right, time, owner);
    return l && r;
  }
  if (const auto* b = a.term_if<BigAnd>()) {
    bool ok = true;
    for (const auto& t : b->terms) ok = read_guard(t, time, owner) && ok;
    return ok;
  }
  throw UnsupportedFragment("negation or disjunction in a guard");
}

void walk(const Invariant& m, const Context& ctx, std::vector<TimedFact>& out) {
  std::visit(Overloaded{
                 [&](const And& x) {
                   walk(x.left, ctx, out);
                   walk(x.right, ctx, out);
                 },
                 [&](const BigAnd& x) {
                   for (const auto& t : x.terms) walk(t, ctx, out);
                 },
                 [&](const Or&) {
                   if (contains_fact(m)) throw UnsupportedFragment("disjunction above facts");
                 },
                 [&](const Not&) {
                   if (contains_fact(m)) throw UnsupportedFragment("negation above facts");
                 },
                 [&](const Implies& x) {
                   std::optional<TimeGuard> time;
                   std::optional<std::string> owner;
                   if (!read_guard(x.antecedent, time, owner)) return;
                   Context inner = ctx;
                   if (time) inner.time = time;
                   if (owner) inner.owner = owner;
                   walk(x.consequent, inner, out);
                 },
                 [&](const AtomValue& a) {
                   if (!is_fact(a)) return;
                   out.push_back(TimedFact{ctx.time.value_or(AllTime{}), a, ctx.owner});
                 },
             },
             m.node().value);
}

}  // namespace

std::vector<TimedFact> flatten(const Invariant& m) {
  std::vector<TimedFact> out;
  walk(normalize(m), Context{}, out);
  return out;
}

bool guard_contains(const TimeGuard& g, Tick t) {
  return std::visit(Overloaded{
                        [](const AllTime&) { return true; },
                        [t](const TimePoint& p) { return p.t == t; },
                        [t](const TimeInterval& i) { return i.from <= t && t <= i.to; },
                        [](const TimeStamp&) { return false; },
                    },
                    g);
}

std::optional<std::pair<Tick, Tick>> guard_window(const TimeGuard& g, Tick horizon) {
  using W = std::optional<std::pair<Tick, Tick>>;
  return std::visit(Overloaded{
                        [&](const AllTime&) -> W { return std::pair<Tick, Tick>{0, horizon}; },
                        [&](const TimePoint& p) -> W {
                          return std::pair<Tick, Tick>{p.t, std::min(p.t, horizon)};
                        },
                        [&](const TimeInterval& i) -> W {
                          return std::pair<Tick, Tick>{std::max<Tick>(i.from, 0),
                                                       std::min(i.to, horizon)};
                        },
                        [](const TimeStamp&) -> W { return std::nullopt; },
                    },
                    g);
}

std::vector<AtomValue> slice_at(const std::vector<TimedFact>& facts, Tick t) {
  std::vector<AtomValue> out;
  for (const auto& f : facts) {
    if (guard_contains(f.time, t)) out.push_back(f.payload);
  }
  return out;
}

TimedFact fold_points_to_interval(const std::vector<TimedFact>& facts, std::string_view owner) {
  Tick lo = std::numeric_limits<Tick>::max();
  Tick hi = std::numeric_limits<Tick>::min();
  std::optional<geo::Box> bounds;
  for (const auto& f : facts) {
    if (!f.owner || *f.owner != owner) continue;
    const auto* p = std::get_if<TimePoint>(&f.time);
    if (!p) throw std::invalid_argument("fold_points_to_interval: fact is not point-timed");
    if (!is_occupancy_atom(f.payload)) {
      throw std::invalid_argument("fold_points_to_interval: payload is not an occupancy atom");
    }
    lo = std::min(lo, p->t);
    hi = std::max(hi, p->t);
    geo::Box b = geo::bounding_box(geo::region_from_atom(f.payload));
    bounds = bounds ? geo::bounding_box(*bounds, b) : b;
  }
  if (!bounds) throw EmptySelection(fmt::format("no point-timed facts for owner '{}'", owner));
  return TimedFact{TimeInterval{lo, hi},
                   OccupyBox{bounds->x1, bounds->y1, bounds->x2, bounds->y2},
                   std::string(owner)};
}

}  // namespace stmc::temporal
