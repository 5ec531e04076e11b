#include "stmc/topology.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include <fmt/format.h>

#include "stmc/detail/overloaded.hpp"
#include "stmc/errors.hpp"
#include "stmc/temporal.hpp"

namespace stmc::topology {

namespace {

using detail::Overloaded;

void require_node(const std::set<std::string>& nodes, std::string_view n) {
  if (nodes.find(std::string(n)) == nodes.end()) {
    throw UnknownNode(fmt::format("unknown node '{}'", n));
  }
}

Window window_of(const temporal::TimeGuard& g) {
  return std::visit(Overloaded{
                        [](const temporal::AllTime&) { return Window{0, kEndOfTime}; },
                        [](const TimePoint& p) { return Window{p.t, p.t}; },
                        [](const TimeInterval& i) { return Window{i.from, i.to}; },
                        [](const TimeStamp& s) -> Window {
                          throw UnresolvedEventTime(fmt::format(
                              "edge guarded by TERTP(\"{}\", {}) has no trigger binding",
                              s.ert.event, s.ert.offset));
                        },
                    },
                    g);
}

}  // namespace

UndirectedEdge::UndirectedEdge(std::string x, std::string y) {
  if (y < x) std::swap(x, y);
  a = std::move(x);
  b = std::move(y);
}

void TimeIndexedGraph::add_slice(Window interval, std::set<UndirectedEdge> edges) {
  for (const auto& e : edges) {
    nodes.insert(e.a);
    nodes.insert(e.b);
  }
  slices.push_back(GraphSlice{interval, std::move(edges)});
}

TimeIndexedGraph TimeIndexedGraph::untimed(std::set<UndirectedEdge> edges) {
  TimeIndexedGraph g;
  g.add_slice(Window{0, kEndOfTime}, std::move(edges));
  return g;
}

TimeIndexedGraph graph_from_model(const Invariant& m, const std::optional<std::string>& owner) {
  const auto facts = temporal::flatten(owner ? filter_by_owner(m, *owner) : m);
  std::vector<std::pair<Window, std::set<UndirectedEdge>>> groups;
  for (const auto& f : facts) {
    const auto* e = std::get_if<Edge>(&f.payload);
    if (!e) continue;
    const Window w = window_of(f.time);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == w; });
    if (it == groups.end()) {
      groups.emplace_back(w, std::set<UndirectedEdge>{});
      it = std::prev(groups.end());
    }
    it->second.emplace(e->source, e->target);
  }
  TimeIndexedGraph g;
  for (auto& [w, edges] : groups) g.add_slice(w, std::move(edges));
  return g;
}

std::set<UndirectedEdge> graph_at(const TimeIndexedGraph& g, Tick t) {
  std::set<UndirectedEdge> out;
  for (const auto& s : g.slices) {
    if (s.interval.from <= t && t <= s.interval.to) out.insert(s.edges.begin(), s.edges.end());
  }
  return out;
}

bool connected(const TimeIndexedGraph& g, std::string_view a, std::string_view b, Tick t) {
  require_node(g.nodes, a);
  require_node(g.nodes, b);
  if (a == b) return true;
  std::map<std::string_view, std::vector<std::string_view>> adj;
  const auto edges = graph_at(g, t);
  for (const auto& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::set<std::string_view> seen{a};
  std::deque<std::string_view> frontier{a};
  while (!frontier.empty()) {
    const auto n = frontier.front();
    frontier.pop_front();
    for (const auto& m : adj[n]) {
      if (m == b) return true;
      if (seen.insert(m).second) frontier.push_back(m);
    }
  }
  return false;
}

std::vector<Window> connectivity_windows(const TimeIndexedGraph& g, std::string_view a,
                                         std::string_view b, Tick horizon) {
  require_node(g.nodes, a);
  require_node(g.nodes, b);
  std::vector<Window> out;
  if (horizon < 0) return out;

  // The edge set is constant between consecutive boundaries.
  std::vector<Tick> cuts{0};
  for (const auto& s : g.slices) {
    if (s.interval.from > 0 && s.interval.from <= horizon) cuts.push_back(s.interval.from);
    if (s.interval.to < horizon) cuts.push_back(s.interval.to + 1);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const Tick from = cuts[i];
    const Tick to = i + 1 < cuts.size() ? cuts[i + 1] - 1 : horizon;
    if (!connected(g, a, b, from)) continue;
    if (!out.empty() && out.back().to + 1 == from) {
      out.back().to = to;
    } else {
      out.push_back(Window{from, to});
    }
  }
  return out;
}

void TransitionSystem::add(std::string source, std::string event, std::string target) {
  states.insert(source);
  states.insert(target);
  transitions.insert(TransitionRule{std::move(source), std::move(event), std::move(target)});
}

TransitionSystem transition_system_from(const Invariant& m) {
  TransitionSystem ts;
  for_each_atom(m, [&](const AtomValue& a) {
    if (const auto* t = std::get_if<Transition>(&a)) ts.add(t->source, t->event, t->target);
  });
  return ts;
}

std::set<std::string> reachable_states(const TransitionSystem& ts, std::string_view start,
                                       const std::vector<std::string>& events) {
  require_node(ts.states, start);
  std::set<std::string> current{std::string(start)};
  for (const auto& ev : events) {
    std::set<std::string> next;
    for (const auto& s : current) {
      bool moved = false;
      for (const auto& t : ts.transitions) {
        if (t.source == s && t.event == ev) {
          next.insert(t.target);
          moved = true;
        }
      }
      if (!moved) next.insert(s);
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace stmc::topology
