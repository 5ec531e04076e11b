#include "stmc/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "stmc/checker.hpp"
#include "stmc/dimacs.hpp"
#include "stmc/dsl.hpp"
#include "stmc/errors.hpp"
#include "stmc/pipeline.hpp"
#include "stmc/scenario.hpp"
#include "stmc/topology.hpp"

namespace stmc::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kHolds = 0;
constexpr int kViolated = 1;
constexpr int kUsage = 2;

// Raised for bad flag values that CLI11 cannot validate on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  Coord resolution = 1;
  Tick horizon = 86399;
  std::string format = "text";
};

std::vector<Coord> parse_ints(const std::string& text, const char* flag) {
  std::vector<Coord> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Coord v = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || p != item.data() + item.size()) {
      throw UsageError(fmt::format("{}: '{}' is not an integer", flag, item));
    }
    out.push_back(v);
  }
  return out;
}

Tick parse_tick(const std::string& text, const char* flag) {
  auto t = dsl::parse_tick_literal(text);
  if (!t) throw UsageError(fmt::format("{}: '{}' is not a tick or HH:MM:SS", flag, text));
  return *t;
}

std::vector<Invariant> load_all(const std::vector<std::string>& paths) {
  std::vector<Invariant> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(dsl::load_model_file(p));
  return out;
}

// EV=T bindings applied to every model.
std::vector<Invariant> bind(std::vector<Invariant> models, const std::vector<std::string>& triggers) {
  for (const auto& tr : triggers) {
    const auto eq = tr.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError(fmt::format("--trigger: expected EVENT=TICK, got '{}'", tr));
    }
    const Tick at = parse_tick(tr.substr(eq + 1), "--trigger");
    for (auto& m : models) m = checker::resolve_trigger(m, tr.substr(0, eq), at);
  }
  return models;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  f << text;
  if (!f) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
}

std::string sanitize(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

struct CheckArgs {
  std::vector<std::string> files;
  std::vector<std::string> collision;
  std::vector<std::string> coverage;
  std::string target;
  std::vector<std::string> connected;
  std::string nearby;
  std::string at;
  std::string graph;
  Coord radius = 0;
  std::vector<std::string> triggers;
};

geo::Region parse_target(const std::string& text) {
  const auto v = parse_ints(text, "--target");
  if (v.size() == 4) return geo::make_box(v[0], v[1], v[2], v[3]);
  if (v.size() == 3 && v[2] >= 0) return geo::Circle{v[0], v[1], v[2]};
  throw UsageError("--target: expected x1,y1,x2,y2 or cx,cy,r");
}

checker::Query build_query(const CheckArgs& a, const Globals& g) {
  const int chosen = !a.collision.empty() + !a.coverage.empty() + !a.connected.empty() +
                     !a.nearby.empty();
  if (chosen != 1) {
    throw UsageError("choose exactly one of --collision, --coverage, --connected, --nearby");
  }
  if (!a.collision.empty()) {
    return checker::CollisionAbsence{a.collision[0], a.collision[1], g.horizon, g.resolution};
  }
  if (!a.coverage.empty()) {
    if (a.target.empty()) throw UsageError("--coverage needs --target");
    return checker::Coverage{a.coverage, parse_target(a.target), g.horizon, g.resolution};
  }
  if (a.at.empty()) throw UsageError("--connected and --nearby need --at");
  const Tick t = parse_tick(a.at, "--at");
  if (!a.connected.empty()) {
    checker::Connectivity q{a.connected[0], a.connected[1], t, std::nullopt};
    if (!a.graph.empty()) q.graph_owner = a.graph;
    return q;
  }
  return checker::NearbyDevices{a.nearby, t, a.radius};
}

int cmd_parse(const std::vector<std::string>& files, std::ostream& out) {
  for (const auto& f : files) {
    const Invariant m = dsl::load_model_file(f);
    const auto owners = list_owners(m);
    out << fmt::format("{}: ok, {} nodes, owners: {}\n", f, term_size(m),
                       owners.empty() ? std::string("none")
                                      : fmt::format("{}", fmt::join(owners, ", ")));
  }
  return kHolds;
}

int cmd_print(const std::string& file, std::ostream& out) {
  out << dsl::print_model(dsl::load_model_file(file));
  return kHolds;
}

int cmd_check(const CheckArgs& a, const Globals& g, std::ostream& out) {
  const checker::Query q = build_query(a, g);
  const auto models = bind(load_all(a.files), a.triggers);
  const checker::Verdict v = checker::check(q, models);
  out << (g.format == "structured" ? checker::to_structured(q, v) : checker::to_text(q, v));
  return v.holds ? kHolds : kViolated;
}

struct ExportArgs {
  std::vector<std::string> files;
  std::vector<std::string> collision;
  std::string out;
  std::string bounds;
  bool solve = false;
  std::vector<std::string> triggers;
};

int cmd_export(const ExportArgs& a, const Globals& g, std::ostream& out) {
  const auto models = bind(load_all(a.files), a.triggers);
  const checker::CollisionAbsence q{a.collision[0], a.collision[1], g.horizon, g.resolution};

  std::set<std::string> known;
  for (const auto& m : models) known.merge(list_owners(m));
  std::vector<dimacs::OwnedPoints> sets;
  if (!known.empty()) {
    for (const auto& owner : {q.owner_a, q.owner_b}) {
      if (known.count(owner) == 0) throw UnknownOwner(fmt::format("unknown owner '{}'", owner));
    }
    const Invariant m = models.size() == 1 ? models.front() : make_big_and(models);
    for (const auto& owner : {q.owner_a, q.owner_b}) {
      sets.push_back({owner, checker::ground_points(m, owner, q.horizon, q.resolution,
                                                    geo::Approx::Over)});
    }
  }
  dimacs::Bounds bounds;
  if (a.bounds.empty()) {
    bounds = dimacs::infer_bounds(sets);
  } else {
    const auto v = parse_ints(a.bounds, "--bounds");
    if (v.size() != 3 || v[0] < 0 || v[1] < 0 || v[2] < 0) {
      throw UsageError("--bounds: expected X,Y,T");
    }
    bounds = dimacs::Bounds{v[0], v[1], v[2]};
  }
  const std::string cnf_text = dimacs::export_collision(sets, q, bounds);
  write_file(a.out, cnf_text);
  const dimacs::Cnf cnf = dimacs::parse(cnf_text);
  out << fmt::format("wrote {}\nvariables: {}\nclauses: {}\n", a.out, cnf.declared_vars,
                     cnf.clauses.size());
  if (a.solve) {
    const bool sat = dimacs::solve(cnf).satisfiable;
    out << fmt::format("satisfiable: {}\ncollision: {}\n", sat, sat ? "possible" : "absent");
  }
  return kHolds;
}

int cmd_windows(const std::vector<std::string>& nodes, const std::vector<std::string>& files,
                const std::string& owner, const Globals& g, std::ostream& out) {
  const auto models = load_all(files);
  const Invariant m = models.size() == 1 ? models.front() : make_big_and(models);
  std::optional<std::string> restrict_to;
  if (!owner.empty()) restrict_to = owner;
  const auto graph = topology::graph_from_model(m, restrict_to);
  const auto windows = topology::connectivity_windows(graph, nodes[0], nodes[1], g.horizon);
  Tick total = 0;
  for (const auto& w : windows) {
    out << fmt::format("[{}, {}]  {} - {}\n", w.from, w.to, dsl::format_clock(w.from),
                       dsl::format_clock(w.to));
    total += w.to - w.from + 1;
  }
  out << fmt::format("connected ticks: {}\n", total);
  return kHolds;
}

struct ReplayArgs {
  std::string log;
  std::vector<std::string> models;
  std::string out_dir;
  bool split = false;
  int k = 1;
  Tick window = 60;
  std::size_t jobs = 1;
};

int cmd_replay(const ReplayArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  std::ifstream log(a.log, std::ios::binary);
  if (!log) {
    err << fmt::format("error: cannot read event log {}\n", a.log);
    return kUsage;
  }
  pipeline::PipelineConfig cfg;
  cfg.confidence_k = a.k;
  cfg.confidence_window = a.window;
  cfg.parallelism = a.jobs;
  cfg.horizon = g.horizon;
  const pipeline::ModelSet models(load_all(a.models), cfg);
  pipeline::SharedState state;
  const auto result = pipeline::replay(log, models, state, cfg);

  const std::string report = pipeline::dead_letter_report(result.dead_letters);
  if (a.out_dir.empty()) {
    out << pipeline::join_documents(result.documents);
  } else {
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    if (a.split) {
      for (std::size_t i = 0; i < result.documents.size(); ++i) {
        const auto& d = result.documents[i];
        write_file(dir / fmt::format("{:04}_{}.xml", i + 1, sanitize(d.event_id)), d.xml + "\n");
      }
    } else {
      write_file(dir / "displays.xml", pipeline::join_documents(result.documents));
    }
    write_file(dir / "dead_letters.json", report);
    out << fmt::format("documents: {}\nsuppressed: {}\ndead letters: {}\n", result.documents.size(),
                       result.suppressed, result.dead_letters.size());
  }
  if (result.dead_letters.empty()) return kHolds;
  err << report;
  return kViolated;
}

int cmd_scenario(const std::string& dir_name, std::ostream& out) {
  const fs::path dir(dir_name);
  const scenario::ScenarioConfig cfg;
  const std::pair<const char*, Invariant> files[] = {
      {"comm_model.bsd", scenario::build_comm_model()},
      {"site_graphs.bsd", scenario::site_graphs_model()},
      {"trajectory_default.bsd", scenario::build_trajectory_model(cfg)},
      {"sensors_2x2.bsd", scenario::sensor_model(scenario::build_sensor_grid(cfg))},
  };
  for (const auto& [name, model] : files) {
    write_file(dir / name, dsl::print_model(model));
    out << (dir / name).string() << '\n';
  }
  return kHolds;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatio-temporal model checker for plant models (.bsd files)", "stmc"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--resolution", g.resolution, "Grid cell size in points (>= 1)")
      ->check(CLI::Range(Coord{1}, std::numeric_limits<Coord>::max()))
      ->capture_default_str();
  app.add_option("--horizon", g.horizon, "Last tick considered")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();

  std::vector<std::string> parse_files;
  auto* parse = app.add_subcommand("parse", "Parse model files and summarize them");
  parse->add_option("files", parse_files, "Model files")->required();

  std::string print_file;
  auto* print = app.add_subcommand("print", "Print a model in canonical form");
  print->add_option("file", print_file, "Model file")->required();

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Decide a query over the conjunction of the models");
  check->add_option("files", ca.files, "Model files")->required();
  check->add_option("--collision", ca.collision, "Collision absence between owners A B")
      ->expected(2)
      ->allow_extra_args(false);
  check->add_option("--coverage", ca.coverage, "Sensor owners covering --target")
      ->delimiter(',')
      ->allow_extra_args(false);
  check->add_option("--target", ca.target, "Target region x1,y1,x2,y2 or cx,cy,r");
  check->add_option("--connected", ca.connected, "Connectivity of nodes A B at --at")
      ->expected(2)
      ->allow_extra_args(false);
  check->add_option("--graph", ca.graph, "Restrict --connected to one graph owner");
  check->add_option("--nearby", ca.nearby, "Owners near O at --at within --radius");
  check->add_option("--radius", ca.radius, "Chebyshev radius for --nearby")
      ->check(CLI::NonNegativeNumber);
  check->add_option("--at", ca.at, "Tick as HH:MM:SS or integer");
  check->add_option("--trigger", ca.triggers, "Bind event-relative times: EVENT=TICK")
      ->allow_extra_args(false);

  ExportArgs ea;
  auto* exp = app.add_subcommand("export", "Write the DIMACS goal of a collision query");
  exp->add_option("files", ea.files, "Model files")->required();
  exp->add_option("--collision", ea.collision, "Owners A B")
      ->expected(2)
      ->allow_extra_args(false)
      ->required();
  exp->add_option("--out", ea.out, "Output .cnf file")->required();
  exp->add_option("--bounds", ea.bounds, "Grid bounds X,Y,T (inferred when omitted)");
  exp->add_flag("--solve", ea.solve, "Also run the built-in DPLL on the export");
  exp->add_option("--trigger", ea.triggers, "Bind event-relative times: EVENT=TICK")
      ->allow_extra_args(false);

  std::vector<std::string> win_nodes;
  std::vector<std::string> win_files;
  std::string win_owner;
  auto* windows = app.add_subcommand("windows", "Connectivity windows of two nodes");
  windows->add_option("nodes", win_nodes, "Nodes A B")
      ->expected(2)
      ->allow_extra_args(false)
      ->required();
  windows->add_option("files", win_files, "Model files")->required();
  windows->add_option("--owner", win_owner, "Restrict to one graph owner");

  ReplayArgs ra;
  auto* replay = app.add_subcommand("replay", "Replay an event log against the models");
  replay->add_option("log", ra.log, "Newline-delimited JSON event log")->required();
  replay->add_option("models", ra.models, "Model files");
  replay->add_option("--out", ra.out_dir, "Write documents and dead letters under DIR");
  replay->add_flag("--split", ra.split, "One XML file per event (with --out)");
  replay->add_option("--k", ra.k, "Confidence threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  replay->add_option("--window", ra.window, "Confidence window in ticks")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  replay->add_option("--jobs", ra.jobs, "Handler threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string scenario_dir;
  auto* scen = app.add_subcommand("scenario", "Write the example plant models");
  scen->add_option("--out", scenario_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kHolds : kUsage;
  }

  try {
    if (*parse) return cmd_parse(parse_files, out);
    if (*print) return cmd_print(print_file, out);
    if (*check) return cmd_check(ca, g, out);
    if (*exp) return cmd_export(ea, g, out);
    if (*windows) return cmd_windows(win_nodes, win_files, win_owner, g, out);
    if (*replay) return cmd_replay(ra, g, out, err);
    if (*scen) return cmd_scenario(scenario_dir, out);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace stmc::cli
