#pragma once

// Grounding of models into spatio-temporal point sets and the decision
// procedures built on them.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stmc/geometry.hpp"
#include "stmc/invariant.hpp"

namespace stmc::checker {

// Over-approximated occupancies of the two owners never share a cell.
struct CollisionAbsence {
  std::string owner_a;
  std::string owner_b;
  Tick horizon = 0;
  Coord resolution = 1;
};

// Every cell meeting `target` lies in some sensor's under-approximated range,
// at every tick up to the horizon.
struct Coverage {
  std::vector<std::string> sensor_owners;
  geo::Region target;
  Tick horizon = 0;
  Coord resolution = 1;
};

// Owners whose occupancy at tick t comes within Chebyshev distance `radius`
// of `owner`'s occupancy.
struct NearbyDevices {
  std::string owner;
  Tick t = 0;
  Coord radius = 0;
};

// Path between two nodes of the edge facts at tick t, optionally restricted
// to one owner's graph.
struct Connectivity {
  std::string a;
  std::string b;
  Tick t = 0;
  std::optional<std::string> graph_owner;
};

using Query = std::variant<CollisionAbsence, Coverage, NearbyDevices, Connectivity>;

// For collision and coverage x, y are cell indices at the query resolution.
struct Witness {
  Tick t = 0;
  Coord x = 0;
  Coord y = 0;
  std::string detail;
};

struct Stats {
  std::size_t ground_atoms = 0;
  std::size_t ticks_checked = 0;
};

struct Verdict {
  bool holds = false;
  std::optional<Witness> witness;
  Stats stats;
  // Nearby owners for NearbyDevices; empty otherwise.
  std::vector<std::string> owners;
  std::string summary;
};

// Cells occupied by `owner` at each tick in [0, horizon]. Throws
// UnsupportedFragment and UnresolvedEventTime.
geo::PointSet4D ground_points(const Invariant& m, std::string_view owner, Tick horizon,
                              Coord resolution, geo::Approx mode);

// TimeStamp(TERTP(event, off)) -> TimePoint(trigger_tick + off).
Invariant resolve_trigger(const Invariant& m, std::string_view event, Tick trigger_tick);

// The models are read as one conjunction. Throws UnknownOwner, UnknownNode,
// UnsupportedFragment, UnresolvedEventTime.
Verdict check(const Query& q, const std::vector<Invariant>& models);

std::string describe(const Query& q);

// "key: value" lines.
std::string to_text(const Query& q, const Verdict& v);

// JSON object {query, holds, witness, stats, owners}.
std::string to_structured(const Query& q, const Verdict& v);

}  // namespace stmc::checker
