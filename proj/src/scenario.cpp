#include "stmc/scenario.hpp"

#include <random>

#include <fmt/format.h>

#include "stmc/dsl.hpp"

namespace stmc::scenario {

namespace {

Invariant edge(const char* a, const char* b) { return make_atom(Edge{a, b}); }

Invariant clock_interval(int h1, int m1, int s1, int h2, int m2, int s2) {
  return make_atom(TimeInterval{dsl::clock_to_tick(h1, m1, s1), dsl::clock_to_tick(h2, m2, s2), true});
}

Invariant owned(const char* owner, Invariant body) {
  return make_implies(make_atom(Owner{owner}), std::move(body));
}

Invariant timestamped_box(Tick i, const geo::Box& b) {
  return make_implies(make_atom(TimeStamp{EventRelativeTime{kTriggerEvent, i}}),
                      make_atom(geo::to_atom(b)));
}

}  // namespace

Invariant build_comm_model() {
  return owned(
      kCommGraphOwner,
      make_big_and({
          make_implies(clock_interval(0, 0, 0, 23, 30, 59),
                       make_big_and({edge("ComHub", "Robot1"), edge("ComHub", "Robot2"),
                                     edge("ComHub", "Robot3"), edge("ComHub", "Store"),
                                     edge("ComHub", "ConvBelt")})),
          make_implies(clock_interval(23, 31, 0, 23, 45, 59),
                       make_big_and({edge("ComHub", "Robot1"), edge("ComHub", "Robot2"),
                                     edge("ComHub", "Robot3"), edge("ComHub", "Store")})),
          make_implies(clock_interval(23, 46, 0, 23, 59, 59),
                       make_big_and({edge("ComHub", "Robot1"), edge("ComHub", "Store"),
                                     edge("ComHub", "ConvBelt")})),
      }));
}

Coord belt_position(Tick t, const ScenarioConfig& cfg) { return cfg.belt_speed * t; }

geo::Box move_work_piece(Tick t, const ScenarioConfig& cfg) {
  if (t < 1000 && t > 0) {
    const Coord x = belt_position(t, cfg);
    return geo::Box{x, cfg.workpiece_y1, x + cfg.workpiece_width, cfg.workpiece_y2};
  }
  return geo::Box{0, 0, 0, 0};
}

geo::Box default_robot_path(Tick t) {
  constexpr Coord x1 = 45;
  constexpr Coord x2 = 75;
  constexpr Coord height = 40;
  Coord y1 = 0;
  if (t < 40) {
    y1 = 160 - t;
  } else if (t <= 60) {
    y1 = 110;
  } else {
    y1 = 121 + (t - 61);
  }
  return geo::Box{x1, y1, x2, y1 + height};
}

Invariant build_trajectory_model(const ScenarioConfig& cfg, const RobotPath& robot_path) {
  std::vector<Invariant> robot;
  std::vector<Invariant> piece;
  for (Tick i = cfg.trajectory_ticks; i >= 0; --i) {
    robot.push_back(timestamped_box(i, robot_path(i)));
    piece.push_back(timestamped_box(i, move_work_piece(i, cfg)));
  }
  return make_big_and({owned(kRobotOwner, make_big_and(std::move(robot))),
                       owned(kWorkPieceOwner, make_big_and(std::move(piece)))});
}

Invariant build_trajectory_model(const ScenarioConfig& cfg) {
  return build_trajectory_model(cfg, default_robot_path);
}

std::vector<Sensor> build_sensor_grid(const ScenarioConfig& cfg) {
  std::vector<Sensor> out;
  const auto& g = cfg.sensor_grid;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      out.push_back(Sensor{fmt::format("sensor_{}_{}", r, c),
                           geo::Circle{c * g.spacing, r * g.spacing, g.range}});
    }
  }
  return out;
}

Invariant sensor_model(const std::vector<Sensor>& sensors) {
  std::vector<Invariant> blocks;
  for (const auto& s : sensors) {
    blocks.push_back(make_implies(make_atom(Owner{s.owner}),
                                  make_atom(OccupyCircle{s.range.cx, s.range.cy, s.range.r})));
  }
  return make_big_and(std::move(blocks));
}

topology::TimeIndexedGraph sensor_comm_graph(const std::vector<Sensor>& sensors) {
  std::set<topology::UndirectedEdge> edges;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    for (std::size_t j = i + 1; j < sensors.size(); ++j) {
      edges.emplace(sensors[i].owner, sensors[j].owner);
    }
  }
  auto g = topology::TimeIndexedGraph::untimed(std::move(edges));
  for (const auto& s : sensors) g.nodes.insert(s.owner);
  return g;
}

Invariant site_graphs_model() {
  return make_big_and({
      owned(kSiteCommOwner, make_big_and({edge("ServiceCenter1", "ManufacturingSite"),
                                          edge("ServiceCenter2", "ManufacturingSite")})),
      owned(kSitePhysicalOwner, make_big_and({})),
      owned(kInfluenceOwner,
            make_big_and({edge("Robot1", "ConvBelt"), edge("Robot2", "ConvBelt"),
                          edge("Robot3", "ConvBelt"), edge("Robot1", "Store")})),
  });
}

std::pair<topology::TimeIndexedGraph, topology::TimeIndexedGraph> build_site_graphs() {
  const Invariant m = site_graphs_model();
  return {topology::graph_from_model(m, std::string(kSiteCommOwner)),
          topology::graph_from_model(m, std::string(kInfluenceOwner))};
}

std::vector<pipeline::EventRecord> synthetic_events(const ScenarioConfig& cfg, std::size_t count) {
  static constexpr const char* kOwners[] = {kRobotOwner, kWorkPieceOwner, "Robot1_Space",
                                            "Robot3_Space", "Store_Space"};
  static constexpr const char* kKinds[] = {"malfunction", "sensor_alarm", "maintenance"};
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> owner_d(0, 4);
  std::uniform_int_distribution<int> kind_d(0, 2);
  std::uniform_int_distribution<int> prio_d(0, 9);
  std::uniform_int_distribution<Tick> tick_d(0, cfg.trajectory_ticks);
  std::uniform_int_distribution<int> device_d(0, 7);
  std::vector<pipeline::EventRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    pipeline::EventRecord e;
    e.id = fmt::format("evt-{:05}", i);
    e.source_device = fmt::format("sensor_{}", device_d(rng));
    e.kind = kKinds[kind_d(rng)];
    e.subject_owner = kOwners[owner_d(rng)];
    e.tick = tick_d(rng);
    e.priority = prio_d(rng);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace stmc::scenario
