#pragma once

// Generators for the manufacturing-site example: communication schedule,
// site and physical-influence graphs, sensor grid, robot/workpiece
// trajectories.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "stmc/geometry.hpp"
#include "stmc/invariant.hpp"
#include "stmc/pipeline.hpp"
#include "stmc/topology.hpp"

namespace stmc::scenario {

inline constexpr const char* kRobotOwner = "Robot2_Space";
inline constexpr const char* kWorkPieceOwner = "WorkPiece_Space";
inline constexpr const char* kTriggerEvent = "ConvAct";
inline constexpr const char* kCommGraphOwner = "midlevelcommgraph";
inline constexpr const char* kSiteCommOwner = "sitecommgraph";
inline constexpr const char* kSitePhysicalOwner = "sitephysgraph";
inline constexpr const char* kInfluenceOwner = "physinfluencegraph";

struct SensorGridConfig {
  int rows = 2;
  int cols = 2;
  Coord spacing = 10;
  Coord range = 6;
};

struct ScenarioConfig {
  Coord belt_speed = 1;  // cells per tick
  Coord workpiece_width = 20;
  Coord workpiece_y1 = 100;
  Coord workpiece_y2 = 120;
  Tick trajectory_ticks = 100;
  SensorGridConfig sensor_grid;
  std::uint64_t seed = 1;
};

using RobotPath = std::function<geo::Box(Tick)>;

// Hub-and-spoke link schedule over one day: all five links until 23:30:59,
// the belt link down until 23:45:59, then only Robot1, Store and ConvBelt.
Invariant build_comm_model();

// Belt position belt_speed * t.
Coord belt_position(Tick t, const ScenarioConfig& cfg);

// Box(belt(t), y1, belt(t) + width, y2) for 0 < t < 1000, else Box(0, 0, 0, 0).
geo::Box move_work_piece(Tick t, const ScenarioConfig& cfg);

// Approach / dwell / retreat: a 30 x 40 gripper box over x in [45, 75]
// descending from y = 160, resting at y = 110 (inside the belt band) for
// ticks 40..60, then rising again.
geo::Box default_robot_path(Tick t);

// BIGAND of the robot and workpiece owner blocks; each holds one
// IMPLIES(TimeStamp(TERTP("ConvAct", i)), OccupyBox(...)) per tick
// i = 0..trajectory_ticks, newest first (the generator prepends).
Invariant build_trajectory_model(const ScenarioConfig& cfg, const RobotPath& robot_path);
Invariant build_trajectory_model(const ScenarioConfig& cfg = {});

struct Sensor {
  std::string owner;
  geo::Circle range;
};

// rows x cols sensors "sensor_r_c" at (c * spacing, r * spacing).
std::vector<Sensor> build_sensor_grid(const ScenarioConfig& cfg);
Invariant sensor_model(const std::vector<Sensor>& sensors);
// Sensors talk wirelessly: every pair is linked.
topology::TimeIndexedGraph sensor_comm_graph(const std::vector<Sensor>& sensors);

// Owner blocks: site communication (3 nodes, 2 links), site physical
// interaction (empty), physical influence inside the plant (5 nodes, 4 edges).
Invariant site_graphs_model();

// (site communication graph, physical-influence graph), both untimed.
std::pair<topology::TimeIndexedGraph, topology::TimeIndexedGraph> build_site_graphs();

// Seeded mix of owners, devices, priorities and ticks; ids are unique.
std::vector<pipeline::EventRecord> synthetic_events(const ScenarioConfig& cfg, std::size_t count);

}  // namespace stmc::scenario
