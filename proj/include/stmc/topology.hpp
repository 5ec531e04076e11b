#pragma once

#include <compare>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stmc/invariant.hpp"

namespace stmc::topology {

inline constexpr Tick kEndOfTime = std::numeric_limits<Tick>::max();

// Unordered pair; stored with a <= b.
struct UndirectedEdge {
  std::string a;
  std::string b;

  UndirectedEdge(std::string x, std::string y);
  friend bool operator==(const UndirectedEdge&, const UndirectedEdge&) = default;
  friend auto operator<=>(const UndirectedEdge&, const UndirectedEdge&) = default;
};

// Closed tick interval.
struct Window {
  Tick from = 0;
  Tick to = 0;
  friend bool operator==(const Window&, const Window&) = default;
};

struct GraphSlice {
  Window interval;
  std::set<UndirectedEdge> edges;
};

// Edge sets indexed by (possibly overlapping) time intervals.
struct TimeIndexedGraph {
  std::set<std::string> nodes;
  std::vector<GraphSlice> slices;

  // Adds the endpoints to `nodes`.
  void add_slice(Window interval, std::set<UndirectedEdge> edges);
  // A single slice covering all time.
  static TimeIndexedGraph untimed(std::set<UndirectedEdge> edges);
};

// Edge facts of m (restricted to `owner` when given) grouped by time guard.
// Untimed edges hold on [0, kEndOfTime]. Throws UnresolvedEventTime for
// TimeStamp guards.
TimeIndexedGraph graph_from_model(const Invariant& m,
                                  const std::optional<std::string>& owner = std::nullopt);

std::set<UndirectedEdge> graph_at(const TimeIndexedGraph& g, Tick t);

// Throws UnknownNode.
bool connected(const TimeIndexedGraph& g, std::string_view a, std::string_view b, Tick t);

// Maximal windows inside [0, horizon] where a and b are connected; sorted and
// disjoint. Sweeps slice boundaries rather than individual ticks.
std::vector<Window> connectivity_windows(const TimeIndexedGraph& g, std::string_view a,
                                         std::string_view b, Tick horizon);

struct TransitionRule {
  std::string source;
  std::string event;
  std::string target;
  friend auto operator<=>(const TransitionRule&, const TransitionRule&) = default;
};

struct TransitionSystem {
  std::set<std::string> states;
  std::set<TransitionRule> transitions;

  void add(std::string source, std::string event, std::string target);
};

TransitionSystem transition_system_from(const Invariant& m);

// Set-valued run over `events`: each state steps along every transition the
// event enables and stays put when none is enabled. Throws UnknownNode.
std::set<std::string> reachable_states(const TransitionSystem& ts, std::string_view start,
                                       const std::vector<std::string>& events);

}  // namespace stmc::topology
