#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stmc/invariant.hpp"

namespace stmc::temporal {

// A fact with no time guard holds at every tick.
struct AllTime {
  friend bool operator==(const AllTime&, const AllTime&) = default;
};

using TimeGuard = std::variant<AllTime, TimePoint, TimeInterval, TimeStamp>;

// An occupancy or edge atom with its innermost time guard and owner.
struct TimedFact {
  TimeGuard time;
  AtomValue payload;
  std::optional<std::string> owner;
  friend bool operator==(const TimedFact&, const TimedFact&) = default;
};

// Depth-first list of the model's occupancy and edge facts. The model is
// normalized first. Throws UnsupportedFragment for Not/Or above a fact and for
// guards other than time, owner and TRUE.
std::vector<TimedFact> flatten(const Invariant& m);

// Payloads whose guard contains t. Event-relative guards never match.
std::vector<AtomValue> slice_at(const std::vector<TimedFact>& facts, Tick t);

bool guard_contains(const TimeGuard& g, Tick t);

// Ticks of the guard clipped to [0, horizon]; nullopt for an unresolved
// TimeStamp guard, {1, 0} (empty) when the guard lies past the horizon.
std::optional<std::pair<Tick, Tick>> guard_window(const TimeGuard& g, Tick horizon);

// Safe over-approximation of the point-timed occupancy facts of `owner`:
// one fact spanning [min tick, max tick] whose payload is the bounding box of
// every payload. Throws EmptySelection when `owner` has no facts and
// std::invalid_argument when a selected fact is not point-timed occupancy.
TimedFact fold_points_to_interval(const std::vector<TimedFact>& facts, std::string_view owner);

}  // namespace stmc::temporal
