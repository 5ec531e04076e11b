#pragma once

// Seeded generators and brute-force oracles shared by the unit tests and the
// acceptance runner. The oracles enumerate integer points and ticks directly
// and do not call the analytic code they are compared against.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "stmc/geometry.hpp"
#include "stmc/invariant.hpp"
#include "stmc/temporal.hpp"

namespace stmc::testing {

#ifdef STMC_DATA_DIR
inline std::string data_path(const std::string& name) { return std::string(STMC_DATA_DIR) + "/" + name; }
#endif
#ifdef STMC_GOLDEN_DIR
inline std::string golden_path(const std::string& name) {
  return std::string(STMC_GOLDEN_DIR) + "/" + name;
}
#endif

inline std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen_);
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(range(0, static_cast<std::int64_t>(v.size()) - 1))];
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

inline geo::Region random_shape(Rng& rng, Coord max_coord, Coord max_radius) {
  switch (rng.range(0, 2)) {
    case 0:
      return geo::Pt{rng.range(0, max_coord), rng.range(0, max_coord)};
    case 1: {
      const Coord x1 = rng.range(0, max_coord), x2 = rng.range(0, max_coord);
      const Coord y1 = rng.range(0, max_coord), y2 = rng.range(0, max_coord);
      return geo::Box{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
    }
    default:
      return geo::Circle{rng.range(0, max_coord), rng.range(0, max_coord), rng.range(0, max_radius)};
  }
}

inline geo::Region random_region(Rng& rng, Coord max_coord = 64, Coord max_radius = 20) {
  if (rng.coin(0.2)) {
    geo::Union u;
    const auto n = rng.range(1, 3);
    for (std::int64_t i = 0; i < n; ++i) u.members.push_back(random_shape(rng, max_coord, max_radius));
    return u;
  }
  return random_shape(rng, max_coord, max_radius);
}

// All integer points, by enumeration over a generous window.
inline std::set<std::pair<Coord, Coord>> oracle_points(const geo::Region& r) {
  std::set<std::pair<Coord, Coord>> out;
  if (const auto* p = std::get_if<geo::Pt>(&r.shape)) {
    out.emplace(p->x, p->y);
  } else if (const auto* b = std::get_if<geo::Box>(&r.shape)) {
    for (Coord x = b->x1; x <= b->x2; ++x) {
      for (Coord y = b->y1; y <= b->y2; ++y) out.emplace(x, y);
    }
  } else if (const auto* c = std::get_if<geo::Circle>(&r.shape)) {
    for (Coord x = c->cx - c->r - 1; x <= c->cx + c->r + 1; ++x) {
      for (Coord y = c->cy - c->r - 1; y <= c->cy + c->r + 1; ++y) {
        const Coord dx = x - c->cx, dy = y - c->cy;
        if (dx * dx + dy * dy <= c->r * c->r) out.emplace(x, y);
      }
    }
  } else {
    for (const auto& m : std::get<geo::Union>(r.shape).members) out.merge(oracle_points(m));
  }
  return out;
}

inline bool oracle_intersects(const geo::Region& a, const geo::Region& b) {
  const auto pa = oracle_points(a);
  const auto pb = oracle_points(b);
  return std::any_of(pa.begin(), pa.end(), [&](const auto& p) { return pb.count(p) != 0; });
}

inline bool oracle_includes(const geo::Region& outer, const geo::Region& inner) {
  const auto po = oracle_points(outer);
  const auto pi = oracle_points(inner);
  return std::all_of(pi.begin(), pi.end(), [&](const auto& p) { return po.count(p) != 0; });
}

inline Coord floor_div(Coord a, Coord b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

// Cells of a region's points per mode, by counting points per cell.
inline std::set<std::pair<Coord, Coord>> oracle_cells(const geo::Region& r, Coord res,
                                                      geo::Approx mode) {
  std::map<std::pair<Coord, Coord>, std::int64_t> hits;
  for (const auto& [x, y] : oracle_points(r)) ++hits[{floor_div(x, res), floor_div(y, res)}];
  std::set<std::pair<Coord, Coord>> out;
  for (const auto& [cell, n] : hits) {
    if (mode == geo::Approx::Over || n == res * res) out.insert(cell);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

// Guard evaluation written out from the time-atom definitions.
inline bool oracle_guard_holds(const temporal::TimeGuard& g, Tick t) {
  if (std::holds_alternative<temporal::AllTime>(g)) return true;
  if (const auto* p = std::get_if<TimePoint>(&g)) return p->t == t;
  if (const auto* i = std::get_if<TimeInterval>(&g)) return i->from <= t && t <= i->to;
  return false;
}

// Per-tick ground cells (x, y, t) of one owner: every fact whose guard holds
// at t contributes its cells.
inline std::set<std::tuple<Coord, Coord, Tick>> oracle_ground(const Invariant& m,
                                                              std::string_view owner, Tick horizon,
                                                              Coord res, geo::Approx mode) {
  std::set<std::tuple<Coord, Coord, Tick>> out;
  const auto facts = temporal::flatten(filter_by_owner(m, owner));
  for (const auto& f : facts) {
    if (!is_occupancy_atom(f.payload)) continue;
    const auto cells = oracle_cells(geo::region_from_atom(f.payload), res, mode);
    for (Tick t = 0; t <= horizon; ++t) {
      if (!oracle_guard_holds(f.time, t)) continue;
      for (const auto& [x, y] : cells) out.emplace(x, y, t);
    }
  }
  return out;
}

// Edge reachability at tick t via union-find over the flattened edge facts.
inline bool oracle_connected(const std::vector<temporal::TimedFact>& facts, const std::string& a,
                             const std::string& b, Tick t) {
  if (a == b) return true;
  std::map<std::string, std::string> parent;
  auto find = [&](std::string x) {
    while (parent.count(x) && parent[x] != x) x = parent[x];
    return x;
  };
  for (const auto& f : facts) {
    const auto* e = std::get_if<Edge>(&f.payload);
    if (!e || !oracle_guard_holds(f.time, t)) continue;
    for (const auto& n : {e->source, e->target}) parent.emplace(n, n);
    const auto ra = find(e->source), rb = find(e->target);
    if (ra != rb) parent[ra] = rb;
  }
  return parent.count(a) && parent.count(b) && find(a) == find(b);
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

inline std::string random_name(Rng& rng) {
  static const std::vector<std::string> kNames = {
      "Robot1", "Robot2_Space", "ComHub", "a", "ConvBelt", "x y", "quote\"d", "back\\slash", "",
      "WorkPiece_Space"};
  return rng.pick(kNames);
}

inline AtomValue random_atom(Rng& rng) {
  switch (rng.range(0, 13)) {
    case 0:
      return TimePoint{rng.range(0, kTicksPerDay - 1), rng.coin()};
    case 1: {
      const Tick a = rng.range(0, kTicksPerDay - 1), b = rng.range(0, kTicksPerDay - 1);
      return TimeInterval{std::min(a, b), std::max(a, b), rng.coin()};
    }
    case 2:
      return TimeStamp{EventRelativeTime{random_name(rng), rng.range(0, 200)}};
    case 3:
      return Event{random_name(rng)};
    case 4:
      return Owner{random_name(rng)};
    case 5:
      return Prob{static_cast<double>(rng.range(0, 1000)) / 1000.0};
    case 6:
      return ComponentState{random_name(rng)};
    case 7:
      return OccupyPoint{rng.range(-100, 100), rng.range(-100, 100)};
    case 8: {
      const Coord x1 = rng.range(-100, 100), x2 = rng.range(-100, 100);
      const Coord y1 = rng.range(-100, 100), y2 = rng.range(-100, 100);
      return OccupyBox{x1, y1, x2, y2};
    }
    case 9:
      return OccupyCircle{rng.range(-100, 100), rng.range(-100, 100), rng.range(0, 50)};
    case 10:
      return Edge{random_name(rng), random_name(rng)};
    case 11:
      return Transition{random_name(rng), random_name(rng), random_name(rng)};
    case 12:
      return TrueAtom{};
    default:
      return FalseAtom{};
  }
}

// Depth counts connective levels; an atom has depth 0.
inline Invariant random_term(Rng& rng, int depth) {
  if (depth <= 0 || rng.coin(0.25)) return make_atom(random_atom(rng));
  switch (rng.range(0, 4)) {
    case 0:
      return make_and(random_term(rng, depth - 1), random_term(rng, depth - 1));
    case 1:
      return make_or(random_term(rng, depth - 1), random_term(rng, depth - 1));
    case 2:
      return make_not(random_term(rng, depth - 1));
    case 3:
      return make_implies(random_term(rng, depth - 1), random_term(rng, depth - 1));
    default: {
      std::vector<Invariant> ts;
      const auto n = rng.range(0, 4);
      for (std::int64_t i = 0; i < n; ++i) ts.push_back(random_term(rng, depth - 1));
      return make_big_and(std::move(ts));
    }
  }
}

inline int term_depth(const Invariant& m) {
  if (m.as_atom()) return 0;
  int d = 0;
  if (const auto* x = m.term_if<And>()) d = std::max(term_depth(x->left), term_depth(x->right));
  if (const auto* x = m.term_if<Or>()) d = std::max(term_depth(x->left), term_depth(x->right));
  if (const auto* x = m.term_if<Not>()) d = term_depth(x->term);
  if (const auto* x = m.term_if<Implies>()) {
    d = std::max(term_depth(x->antecedent), term_depth(x->consequent));
  }
  if (const auto* x = m.term_if<BigAnd>()) {
    for (const auto& t : x->terms) d = std::max(d, term_depth(t));
  }
  return d + 1;
}

}  // namespace stmc::testing
