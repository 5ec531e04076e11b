// Acceptance runner: one PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "cases.hpp"
#include "stmc/checker.hpp"
#include "stmc/dimacs.hpp"
#include "stmc/dsl.hpp"
#include "stmc/pipeline.hpp"
#include "stmc/scenario.hpp"
#include "stmc/temporal.hpp"
#include "stmc/topology.hpp"
#include "support.hpp"

using namespace stmc;
using stmc::testing::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failure reason; later ones only bump the count.
class Tally {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_++ == 0) first_ = what;
  }
  Outcome outcome(const std::string& ok_detail) const {
    if (failures_ == 0) return {true, ok_detail};
    return {false, fmt::format("{} failure(s), first: {}", failures_, first_)};
  }

 private:
  std::size_t failures_ = 0;
  std::string first_;
};

Outcome ac1() {
  Tally t;
  const Invariant m = dsl::load_model_file(testing::data_path("comm_model.bsd"));
  const auto g = topology::graph_from_model(m);
  const auto facts = temporal::flatten(m);
  struct Expect {
    const char* node;
    std::vector<topology::Window> windows;
    Tick ticks;
  };
  const Expect expected[] = {{"Robot2", {{0, 85559}}, 85560}, {"ConvBelt", {{0, 84659}, {85560, 86399}}, 85500}};
  for (const auto& e : expected) {
    const auto w = topology::connectivity_windows(g, "ComHub", e.node, 86399);
    t.expect(w == e.windows, fmt::format("windows of ComHub-{}", e.node));
    Tick total = 0;
    for (const auto& x : w) total += x.to - x.from + 1;
    t.expect(total == e.ticks, fmt::format("tick count of ComHub-{} is {}", e.node, total));
    for (Tick tick = 0; tick <= 86399; ++tick) {
      const bool in = std::any_of(w.begin(), w.end(), [&](const auto& x) { return x.from <= tick && tick <= x.to; });
      t.expect(in == testing::oracle_connected(facts, "ComHub", e.node, tick),
               fmt::format("ComHub-{} disagrees with the sweep at tick {}", e.node, tick));
    }
  }
  return t.outcome("ComHub-Robot2 [[0,85559]] 85560 ticks; ComHub-ConvBelt [[0,84659],[85560,86399]] 85500 ticks; "
                   "86400-tick sweep agrees");
}

Outcome ac2() {
  Tally t;
  Rng rng(17);
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    const geo::Region a = testing::random_region(rng, 64, 20);
    const geo::Region b = testing::random_region(rng, 64, 20);
    const bool ok = geo::intersects(a, b) == testing::oracle_intersects(a, b) &&
                    geo::includes(a, b) == testing::oracle_includes(a, b) &&
                    geo::includes(b, a) == testing::oracle_includes(b, a);
    agree += ok;
    t.expect(ok, fmt::format("pair {}", i));
  }
  return t.outcome(fmt::format("{}/1000 pairs agree", agree));
}

Outcome ac3() {
  Tally t;
  Rng rng(19);
  for (int i = 0; i < 500; ++i) {
    const geo::Circle c{rng.range(0, 64), rng.range(0, 64), rng.range(0, 20)};
    t.expect(testing::oracle_includes(geo::overapprox(c), c), fmt::format("overapprox of circle {}", i));
    t.expect(testing::oracle_includes(c, geo::underapprox(c)), fmt::format("underapprox of circle {}", i));
  }
  for (int i = 0; i < 200; ++i) {
    std::vector<Invariant> parts;
    const auto n = rng.range(1, 12);
    for (std::int64_t k = 0; k < n; ++k) {
      parts.push_back(make_implies(
          make_atom(Owner{"R"}),
          make_implies(make_atom(TimePoint{rng.range(0, 500)}),
                       make_atom(OccupyBox{rng.range(-20, 20), rng.range(-20, 20), rng.range(-20, 20),
                                           rng.range(-20, 20)}))));
    }
    const auto facts = temporal::flatten(make_big_and(parts));
    const auto f = temporal::fold_points_to_interval(facts, "R");
    const auto hull = testing::oracle_points(geo::region_from_atom(f.payload));
    for (const auto& in : facts) {
      t.expect(testing::oracle_guard_holds(f.time, std::get<TimePoint>(in.time).t), fmt::format("fold {} tick", i));
      for (const auto& p : testing::oracle_points(geo::region_from_atom(in.payload))) {
        t.expect(hull.count(p) == 1, fmt::format("fold {} point", i));
      }
    }
  }
  return t.outcome("500 circles, 200 folded fact sets, zero violations");
}

// Runs the configured external solver, if any: exit status 10 = SAT, 20 = UNSAT.
std::optional<bool> external_sat(const std::string& cnf_path) {
  const char* solver = std::getenv("STMC_SAT_SOLVER");
  if (!solver || !*solver) return std::nullopt;
  const int status = std::system(fmt::format("{} {} > /dev/null 2>&1", solver, cnf_path).c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (code == 10) return true;
  if (code == 20) return false;
  throw std::runtime_error(fmt::format("external solver exited with {}", code));
}

Outcome ac4() {
  Tally t;
  const auto cases = testing::collision_cases();
  const auto dir = std::filesystem::temp_directory_path() / "stmc_acceptance";
  std::filesystem::create_directories(dir);
  int violated = 0, external = 0;
  for (const auto& c : cases) {
    const bool holds = checker::check(c.query, {c.model}).holds;
    violated += !holds;
    const auto sets = testing::ground_case(c);
    const std::string text = dimacs::export_collision(sets, c.query, dimacs::infer_bounds(sets));
    const bool sat = dimacs::solve(dimacs::parse(text)).satisfiable;
    t.expect(sat == !holds, fmt::format("{}: check holds={} but DPLL sat={}", c.name, holds, sat));
    const auto path = dir / (c.name + ".cnf");
    std::ofstream(path) << text;
    if (const auto ext = external_sat(path.string())) {
      ++external;
      t.expect(*ext == sat, fmt::format("{}: external solver disagrees", c.name));
    }
  }
  std::filesystem::remove_all(dir);
  return t.outcome(fmt::format("{}/{} queries agree ({} collide); external solver: {}", cases.size(), cases.size(),
                               violated, external ? fmt::format("{} checked", external) : "not configured"));
}

Outcome ac5() {
  Tally t;
  auto round_trip = [&](const Invariant& m, const std::string& what) {
    const auto r = dsl::parse_model(dsl::print_model(m));
    t.expect(std::holds_alternative<Invariant>(r) && std::get<Invariant>(r) == m, what);
  };
  for (const char* f : {"comm_model.bsd", "site_graphs.bsd", "trajectory_default.bsd", "sensors_2x2.bsd",
                        "coverage_two_sensors.bsd"}) {
    round_trip(dsl::load_model_file(testing::data_path(f)), f);
  }
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const Invariant m = normalize(testing::random_term(rng, 6));
    t.expect(testing::term_depth(m) <= 6, fmt::format("random term {} too deep", i));
    round_trip(m, fmt::format("random term {}", i));
  }
  return t.outcome("5 fixture models and 1000 random terms (depth <= 6) round-trip");
}

Outcome ac6() {
  Tally t;
  const scenario::ScenarioConfig cfg;
  const Invariant m = scenario::build_trajectory_model(cfg);
  const auto* top = m.term_if<BigAnd>();
  t.expect(top && top->terms.size() == 2, "top level is BIGAND of two owner blocks");
  if (top && top->terms.size() == 2) {
    const char* owners[] = {scenario::kRobotOwner, scenario::kWorkPieceOwner};
    for (std::size_t k = 0; k < 2; ++k) {
      const auto* block = top->terms[k].term_if<Implies>();
      const auto* facts = block ? block->consequent.term_if<BigAnd>() : nullptr;
      t.expect(block && block->antecedent == make_atom(Owner{owners[k]}), fmt::format("owner guard {}", owners[k]));
      t.expect(facts && facts->terms.size() == 101, fmt::format("101 facts for {}", owners[k]));
      if (!facts) continue;
      for (std::size_t i = 0; i < facts->terms.size(); ++i) {
        const auto* fact = facts->terms[i].term_if<Implies>();
        const auto* ts = fact ? fact->antecedent.atom_if<TimeStamp>() : nullptr;
        const Tick off = static_cast<Tick>(facts->terms.size() - 1 - i);
        t.expect(ts && ts->ert.event == scenario::kTriggerEvent && ts->ert.offset == off,
                 fmt::format("{} fact {} guard", owners[k], i));
        const geo::Box expect = k == 0 ? scenario::default_robot_path(off) : scenario::move_work_piece(off, cfg);
        t.expect(fact && fact->consequent == make_atom(geo::to_atom(expect)), fmt::format("{} fact {} box", owners[k], i));
      }
    }
  }
  for (Tick tick = 0; tick <= 2000; ++tick) {
    const Coord x = scenario::belt_position(tick, cfg);
    const geo::Box expect = (tick == 0 || tick >= 1000) ? geo::Box{0, 0, 0, 0} : geo::Box{x, 100, x + 20, 120};
    t.expect(scenario::move_work_piece(tick, cfg) == expect, fmt::format("move_work_piece({})", tick));
  }
  return t.outcome("2 x 101 facts with Owner/TimeStamp(TERTP)/OccupyBox nesting; move_work_piece exact on 0..2000");
}

std::string replay_once(const std::string& log, const std::vector<Invariant>& models, std::size_t jobs) {
  pipeline::PipelineConfig cfg;
  cfg.parallelism = jobs;
  const pipeline::ModelSet set(models, cfg);
  pipeline::SharedState state;
  std::istringstream in(log);
  return pipeline::join_documents(pipeline::replay(in, set, state, cfg).documents);
}

Outcome ac7() {
  Tally t;
  const std::vector<Invariant> models = {dsl::load_model_file(testing::data_path("comm_model.bsd")),
                                         dsl::load_model_file(testing::data_path("site_graphs.bsd")),
                                         dsl::load_model_file(testing::data_path("trajectory_default.bsd"))};
  const std::string log = testing::read_text(testing::data_path("demo_events.ndlog"));
  const std::string golden = testing::read_text(testing::golden_path("demo_replay.xml"));
  const std::string first = replay_once(log, models, 1);
  t.expect(first == golden, "replay differs from the golden XML");
  t.expect(first.find("Robot2_Space as node Robot2 at 23:50:00\nRobot2 to ComHub: unreachable") != std::string::npos,
           "Robot2 unreachable panel missing");

  // Nearby panel of the malfunction event against brute-force Chebyshev distance.
  const pipeline::PipelineConfig cfg;
  const Invariant bound = checker::resolve_trigger(make_big_and(models), scenario::kTriggerEvent, 85761);
  const Tick at = dsl::clock_to_tick(23, 50, 0);
  const auto facts_self = testing::oracle_ground(bound, scenario::kRobotOwner, at, 1, geo::Approx::Over);
  std::vector<std::string> near;
  for (const auto& other : list_owners(bound)) {
    if (other == scenario::kRobotOwner) continue;
    bool hit = false;
    for (const auto& [x, y, tt] : testing::oracle_ground(bound, other, at, 1, geo::Approx::Over)) {
      if (tt != at || hit) continue;
      for (const auto& [sx, sy, st] : facts_self) {
        if (st == at && std::max(std::abs(x - sx), std::abs(y - sy)) <= cfg.nearby_radius) {
          hit = true;
          break;
        }
      }
    }
    if (hit) near.push_back(other);
  }
  const std::string panel = near.empty() ? fmt::format("none within distance {}", cfg.nearby_radius)
                                         : fmt::format("within distance {}: {}", cfg.nearby_radius,
                                                       fmt::join(near, ", "));
  t.expect(golden.find("<panel title=\"Nearby devices\"><body>" + panel + "</body>") != std::string::npos,
           "nearby panel disagrees with the oracle: " + panel);

  for (int i = 0; i < 10; ++i) t.expect(replay_once(log, models, 1) == first, fmt::format("repeat {}", i));
  for (std::size_t jobs : {2, 4, 8}) {
    t.expect(replay_once(log, models, jobs) == first, fmt::format("parallelism {}", jobs));
  }
  return t.outcome("golden XML byte-identical; nearby panel matches oracle (" + panel +
                   "); 10 repeats and parallelism 1/2/4/8 identical");
}

Outcome ac8() {
  Tally t;
  scenario::ScenarioConfig scfg;
  auto events = scenario::synthetic_events(scfg, 1000);
  std::set<std::string> owners;
  for (auto& e : events) {
    e.payload["trigger.ConvAct"] = "0";
    owners.insert(e.subject_owner);
  }
  const std::vector<Invariant> models = {dsl::load_model_file(testing::data_path("comm_model.bsd")),
                                         dsl::load_model_file(testing::data_path("site_graphs.bsd")),
                                         dsl::load_model_file(testing::data_path("trajectory_default.bsd"))};
  for (std::size_t jobs : {1, 4}) {
    pipeline::PipelineConfig cfg;
    cfg.parallelism = jobs;
    const pipeline::ModelSet set(models, cfg);
    pipeline::SharedState state;
    const auto batch = pipeline::ingest(events, cfg.horizon);
    const auto r = pipeline::process(batch, set, state, cfg);
    t.expect(batch.queue.size() == 1000 && batch.dead_letters.empty(), "all events admitted");
    t.expect(state.history_size() == 1000, fmt::format("jobs={}: {} history entries", jobs, state.history_size()));
    std::set<std::string> ids;
    for (const auto& h : state.history()) ids.insert(h.event.id);
    t.expect(ids.size() == 1000, fmt::format("jobs={}: {} distinct ids in history", jobs, ids.size()));
    t.expect(r.documents.size() == 1000, "one document per event");
    for (std::size_t i = 0; i < r.documents.size() && i < batch.queue.size(); ++i) {
      t.expect(r.documents[i].event_id == batch.queue[i].id, fmt::format("document {} out of order", i));
    }
    for (std::size_t i = 1; i < batch.queue.size(); ++i) {
      const auto& a = batch.queue[i - 1];
      const auto& b = batch.queue[i];
      t.expect(std::make_tuple(-a.priority, a.tick, a.id) < std::make_tuple(-b.priority, b.tick, b.id),
               fmt::format("dequeue order at {}", i));
    }
  }
  return t.outcome(fmt::format("1000 events over {} owners: 1000 history appends, (priority, tick, id) order holds "
                               "at parallelism 1 and 4",
                               owners.size()));
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;  // 0 = no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1 communication windows", 5, ac1},    {"AC2 geometry oracle", 10, ac2},
      {"AC3 approximation safety", 0, ac3},     {"AC4 SAT agreement", 30, ac4},
      {"AC5 DSL round-trip", 0, ac5},           {"AC6 trajectory model", 0, ac6},
      {"AC7 use-case replay", 5, ac7},          {"AC8 pipeline stress", 0, ac8},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs >= c.budget_s) {
      o.pass = false;
      o.detail += fmt::format("; over the {:.0f} s budget", c.budget_s);
    }
    failed += !o.pass;
    std::cout << fmt::format("{} {}: {} ({:.2f} s)", o.pass ? "PASS" : "FAIL", c.name, o.detail, secs) << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
