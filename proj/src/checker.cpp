#include "stmc/checker.hpp"

#include <algorithm>
#include <map>
#include <iterator>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "stmc/detail/overloaded.hpp"
#include "stmc/dsl.hpp"
#include "stmc/errors.hpp"
#include "stmc/temporal.hpp"
#include "stmc/topology.hpp"

namespace stmc::checker {

namespace {

using detail::Overloaded;
using geo::GridPoint;
using geo::PointSet4D;

Invariant conjoin(const std::vector<Invariant>& models) {
  if (models.size() == 1) return models.front();
  return make_big_and(models);
}

std::set<std::string> owners_of(const std::vector<Invariant>& models) {
  std::set<std::string> out;
  for (const auto& m : models) out.merge(list_owners(m));
  return out;
}

void require_owner(const std::set<std::string>& known, const std::string& owner) {
  if (known.find(owner) == known.end()) throw UnknownOwner(fmt::format("unknown owner '{}'", owner));
}

std::string region_text(const geo::Region& r) {
  return std::visit(Overloaded{
                        [](const geo::Pt& p) { return fmt::format("Pt({}, {})", p.x, p.y); },
                        [](const geo::Box& b) {
                          return fmt::format("Box({}, {}, {}, {})", b.x1, b.y1, b.x2, b.y2);
                        },
                        [](const geo::Circle& c) {
                          return fmt::format("Circle({}, {}, {})", c.cx, c.cy, c.r);
                        },
                        [](const geo::Union& u) {
                          std::string s = "Union(";
                          for (std::size_t i = 0; i < u.members.size(); ++i) {
                            if (i) s += ", ";
                            s += region_text(u.members[i]);
                          }
                          return s + ")";
                        },
                    },
                    r.shape);
}

// Rows of a tick slice: y -> sorted x.
using RowIndex = std::map<Coord, std::vector<Coord>>;

RowIndex index_rows(const PointSet4D& s) {
  RowIndex rows;
  for (const auto& p : s) rows[p.y].push_back(p.x);
  for (auto& [y, xs] : rows) std::sort(xs.begin(), xs.end());
  return rows;
}

bool within_chebyshev(const RowIndex& rows, Coord x, Coord y, Coord radius) {
  for (auto it = rows.lower_bound(y - radius); it != rows.end() && it->first <= y + radius; ++it) {
    auto lo = std::lower_bound(it->second.begin(), it->second.end(), x - radius);
    if (lo != it->second.end() && *lo <= x + radius) return true;
  }
  return false;
}

// One occupancy fact of an owner: its cells (t = 0) over ticks [from, to].
struct Piece {
  Tick from;
  Tick to;
  PointSet4D cells;
};

// Facts ending before `from` are skipped.
std::vector<Piece> ground_pieces(const Invariant& m, std::string_view owner, Tick horizon,
                                 Coord resolution, geo::Approx mode, Tick from = 0) {
  std::vector<Piece> out;
  for (const auto& f : temporal::flatten(filter_by_owner(m, owner))) {
    if (!is_occupancy_atom(f.payload)) continue;
    const auto window = temporal::guard_window(f.time, horizon);
    if (!window) {
      const auto& ert = std::get<TimeStamp>(f.time).ert;
      throw UnresolvedEventTime(fmt::format("TERTP(\"{}\", {}) under owner '{}' has no trigger binding",
                                            ert.event, ert.offset, owner));
    }
    if (window->first > window->second || window->second < from) continue;
    out.push_back(Piece{window->first, window->second,
                        geo::discretize(geo::region_from_atom(f.payload), 0, resolution, mode)});
  }
  return out;
}

PointSet4D cells_at(const std::vector<Piece>& pieces, Tick t) {
  PointSet4D out;
  for (const auto& p : pieces) {
    if (p.from <= t && t <= p.to) out.merge(p.cells);
  }
  return out;
}

// Maximal tick ranges in [0, horizon] over which the active pieces of every
// group stay fixed.
std::vector<std::pair<Tick, Tick>> segments(const std::vector<const std::vector<Piece>*>& groups,
                                            Tick horizon) {
  std::set<Tick> cuts{0, horizon + 1};
  for (const auto* g : groups) {
    for (const auto& p : *g) {
      cuts.insert(p.from);
      if (p.to < horizon) cuts.insert(p.to + 1);
    }
  }
  std::vector<std::pair<Tick, Tick>> out;
  for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) {
    if (*it > horizon) break;
    out.emplace_back(*it, *std::next(it) - 1);
  }
  return out;
}

std::size_t span_length(const std::pair<Tick, Tick>& s) {
  return static_cast<std::size_t>(s.second - s.first + 1);
}

Verdict run(const CollisionAbsence& q, const std::vector<Invariant>& models) {
  const auto known = owners_of(models);
  require_owner(known, q.owner_a);
  require_owner(known, q.owner_b);
  const Invariant m = conjoin(models);
  const auto a = ground_pieces(m, q.owner_a, q.horizon, q.resolution, geo::Approx::Over);
  const auto b = ground_pieces(m, q.owner_b, q.horizon, q.resolution, geo::Approx::Over);

  Verdict v;
  v.stats.ticks_checked = q.horizon >= 0 ? static_cast<std::size_t>(q.horizon + 1) : 0;
  std::size_t shared = 0;
  for (const auto& seg : segments({&a, &b}, q.horizon)) {
    const PointSet4D sa = cells_at(a, seg.first);
    const PointSet4D sb = cells_at(b, seg.first);
    const PointSet4D both = geo::intersection(sa, sb);
    v.stats.ground_atoms += (sa.size() + sb.size()) * span_length(seg);
    shared += both.size() * span_length(seg);
    if (!both.empty() && !v.witness) {
      const GridPoint& w = *both.begin();
      v.witness = Witness{seg.first, w.x, w.y,
                          fmt::format("{} and {} both occupy cell ({}, {}) at resolution {}",
                                      q.owner_a, q.owner_b, w.x, w.y, q.resolution)};
    }
  }
  v.holds = !v.witness;
  v.summary = v.holds ? fmt::format("no shared cell for {} and {} up to tick {}", q.owner_a,
                                    q.owner_b, q.horizon)
                      : fmt::format("{} shared cells", shared);
  return v;
}

Verdict run(const Coverage& q, const std::vector<Invariant>& models) {
  const auto known = owners_of(models);
  for (const auto& s : q.sensor_owners) require_owner(known, s);
  const Invariant m = conjoin(models);
  std::vector<Piece> ranges;
  for (const auto& s : q.sensor_owners) {
    for (auto& p : ground_pieces(m, s, q.horizon, q.resolution, geo::Approx::Under)) {
      ranges.push_back(std::move(p));
    }
  }
  const PointSet4D cells = geo::discretize(q.target, 0, q.resolution, geo::Approx::Over);

  Verdict v;
  v.holds = true;
  for (const auto& seg : segments({&ranges}, q.horizon)) {
    const PointSet4D covered = cells_at(ranges, seg.first);
    v.stats.ground_atoms += covered.size() * span_length(seg);
    const auto gap = std::find_if(cells.begin(), cells.end(),
                                  [&](const GridPoint& c) { return !covered.contains(c); });
    if (gap != cells.end()) {
      v.holds = false;
      v.stats.ticks_checked += 1;
      v.witness = Witness{seg.first, gap->x, gap->y,
                          fmt::format("cell ({}, {}) outside every sensor range at resolution {}",
                                      gap->x, gap->y, q.resolution)};
      break;
    }
    v.stats.ticks_checked += span_length(seg);
  }
  v.summary = v.holds ? fmt::format("{} target cells covered at every tick", cells.size())
                      : std::string("target not covered");
  return v;
}

Verdict run(const NearbyDevices& q, const std::vector<Invariant>& models) {
  const auto known = owners_of(models);
  require_owner(known, q.owner);
  const Invariant m = conjoin(models);
  const PointSet4D self = cells_at(ground_pieces(m, q.owner, q.t, 1, geo::Approx::Over, q.t), q.t);
  const RowIndex rows = index_rows(self);

  Verdict v;
  v.stats.ground_atoms = self.size();
  v.stats.ticks_checked = 1;
  for (const auto& other : known) {
    if (other == q.owner) continue;
    const PointSet4D pts = cells_at(ground_pieces(m, other, q.t, 1, geo::Approx::Over, q.t), q.t);
    v.stats.ground_atoms += pts.size();
    const auto hit = std::find_if(pts.begin(), pts.end(), [&](const GridPoint& p) {
      return within_chebyshev(rows, p.x, p.y, q.radius);
    });
    if (hit == pts.end()) continue;
    v.owners.push_back(other);
    if (!v.witness) {
      v.witness = Witness{q.t, hit->x, hit->y,
                          fmt::format("{} within distance {} of {}", other, q.radius, q.owner)};
    }
  }
  v.holds = !v.owners.empty();
  v.summary = v.holds ? fmt::format("nearby: {}", fmt::join(v.owners, ", "))
                      : std::string("nothing nearby");
  return v;
}

Verdict run(const Connectivity& q, const std::vector<Invariant>& models) {
  if (q.graph_owner) require_owner(owners_of(models), *q.graph_owner);
  const auto g = topology::graph_from_model(conjoin(models), q.graph_owner);
  Verdict v;
  v.holds = topology::connected(g, q.a, q.b, q.t);
  v.stats.ticks_checked = 1;
  v.stats.ground_atoms = topology::graph_at(g, q.t).size();
  v.summary = fmt::format("{} and {} {} at {}", q.a, q.b, v.holds ? "connected" : "not connected",
                          dsl::format_clock(q.t));
  return v;
}

Invariant rewrite_timestamps(const Invariant& m, std::string_view event, Tick trigger) {
  return std::visit(
      Overloaded{
          [&](const And& x) {
            return make_and(rewrite_timestamps(x.left, event, trigger),
                            rewrite_timestamps(x.right, event, trigger));
          },
          [&](const Or& x) {
            return make_or(rewrite_timestamps(x.left, event, trigger),
                           rewrite_timestamps(x.right, event, trigger));
          },
          [&](const Not& x) { return make_not(rewrite_timestamps(x.term, event, trigger)); },
          [&](const Implies& x) {
            return make_implies(rewrite_timestamps(x.antecedent, event, trigger),
                                rewrite_timestamps(x.consequent, event, trigger));
          },
          [&](const BigAnd& x) {
            std::vector<Invariant> ts;
            ts.reserve(x.terms.size());
            for (const auto& t : x.terms) ts.push_back(rewrite_timestamps(t, event, trigger));
            return make_big_and(std::move(ts));
          },
          [&](const AtomValue& a) {
            if (const auto* s = std::get_if<TimeStamp>(&a); s && s->ert.event == event) {
              return make_atom(TimePoint{trigger + s->ert.offset});
            }
            return m;
          },
      },
      m.node().value);
}

}  // namespace

PointSet4D ground_points(const Invariant& m, std::string_view owner, Tick horizon,
                         Coord resolution, geo::Approx mode) {
  PointSet4D out;
  for (const auto& p : ground_pieces(m, owner, horizon, resolution, mode)) {
    for (Tick t = p.from; t <= p.to; ++t) {
      for (const auto& c : p.cells) out.insert(GridPoint{c.x, c.y, c.z, t});
    }
  }
  return out;
}

Invariant resolve_trigger(const Invariant& m, std::string_view event, Tick trigger_tick) {
  return rewrite_timestamps(m, event, trigger_tick);
}

Verdict check(const Query& q, const std::vector<Invariant>& models) {
  return std::visit([&](const auto& query) { return run(query, models); }, q);
}

std::string describe(const Query& q) {
  return std::visit(
      Overloaded{
          [](const CollisionAbsence& c) {
            return fmt::format("collision-absence {} {} horizon={} resolution={}", c.owner_a,
                               c.owner_b, c.horizon, c.resolution);
          },
          [](const Coverage& c) {
            return fmt::format("coverage sensors={} target={} horizon={} resolution={}",
                               fmt::join(c.sensor_owners, ","), region_text(c.target), c.horizon,
                               c.resolution);
          },
          [](const NearbyDevices& n) {
            return fmt::format("nearby {} t={} radius={}", n.owner, n.t, n.radius);
          },
          [](const Connectivity& c) {
            return fmt::format("connected {} {} t={}{}", c.a, c.b, c.t,
                               c.graph_owner ? " graph=" + *c.graph_owner : std::string());
          },
      },
      q);
}

std::string to_text(const Query& q, const Verdict& v) {
  std::string out;
  out += fmt::format("query: {}\n", describe(q));
  out += fmt::format("holds: {}\n", v.holds ? "true" : "false");
  if (v.witness) {
    out += fmt::format("witness: t={} x={} y={}\n", v.witness->t, v.witness->x, v.witness->y);
    out += fmt::format("witness_detail: {}\n", v.witness->detail);
  }
  if (!v.owners.empty()) out += fmt::format("owners: {}\n", fmt::join(v.owners, ", "));
  out += fmt::format("summary: {}\n", v.summary);
  out += fmt::format("ground_atoms: {}\n", v.stats.ground_atoms);
  out += fmt::format("ticks_checked: {}\n", v.stats.ticks_checked);
  return out;
}

std::string to_structured(const Query& q, const Verdict& v) {
  nlohmann::ordered_json j;
  j["query"] = describe(q);
  j["holds"] = v.holds;
  if (v.witness) {
    j["witness"] = {{"t", v.witness->t},
                    {"x", v.witness->x},
                    {"y", v.witness->y},
                    {"detail", v.witness->detail}};
  } else {
    j["witness"] = nullptr;
  }
  j["stats"] = {{"ground_atoms", v.stats.ground_atoms}, {"ticks_checked", v.stats.ticks_checked}};
  j["owners"] = v.owners;
  j["summary"] = v.summary;
  return j.dump(2) + "\n";
}

}  // namespace stmc::checker
