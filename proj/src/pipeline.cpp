#include "stmc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "stmc/checker.hpp"
#include "stmc/dsl.hpp"
#include "stmc/errors.hpp"

namespace stmc::pipeline {

namespace {

using nlohmann::json;

constexpr std::string_view kTriggerPrefix = "trigger.";

bool valid_target(const std::string& t) { return t == "workstation" || t == "mobile" || t == "wall"; }

// Empty when valid.
std::string validate(const EventRecord& e, Tick horizon) {
  if (e.id.empty()) return "missing field 'id'";
  if (e.source_device.empty()) return "missing field 'source_device'";
  if (e.kind.empty()) return "missing field 'kind'";
  if (e.subject_owner.empty()) return "missing field 'subject_owner'";
  if (e.tick < 0) return "negative tick";
  if (e.tick > horizon) return fmt::format("tick {} beyond horizon {}", e.tick, horizon);
  if (e.priority < 0) return "negative priority";
  for (const auto& [k, v] : e.payload) {
    if (k.rfind(kTriggerPrefix, 0) == 0 && !dsl::parse_tick_literal(v)) {
      return fmt::format("payload '{}' is not a tick", k);
    }
    if (k == "display" && !valid_target(v)) return fmt::format("invalid display target '{}'", v);
  }
  return {};
}

bool queue_order(const EventRecord& a, const EventRecord& b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  if (a.tick != b.tick) return a.tick < b.tick;
  return a.id < b.id;
}

// Empty reason on success.
std::string decode_line(const std::string& line, EventRecord& out) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) return "malformed JSON";
  if (!j.is_object()) return "record is not an object";
  for (const char* key : {"id", "source_device", "kind", "subject_owner"}) {
    if (!j.contains(key)) return fmt::format("missing field '{}'", key);
    if (!j[key].is_string()) return fmt::format("field '{}' is not a string", key);
  }
  out.id = j["id"].get<std::string>();
  out.source_device = j["source_device"].get<std::string>();
  out.kind = j["kind"].get<std::string>();
  out.subject_owner = j["subject_owner"].get<std::string>();

  if (!j.contains("tick")) return "missing field 'tick'";
  const auto& tick = j["tick"];
  if (tick.is_number_integer()) {
    out.tick = tick.get<Tick>();
  } else if (tick.is_string()) {
    auto t = dsl::parse_tick_literal(tick.get<std::string>());
    if (!t) return "field 'tick' is not a tick";
    out.tick = *t;
  } else {
    return "field 'tick' is not a tick";
  }

  if (j.contains("priority")) {
    if (!j["priority"].is_number_integer()) return "field 'priority' is not an integer";
    const auto p = j["priority"].get<std::int64_t>();
    if (p < 0 || p > std::numeric_limits<int>::max()) return "field 'priority' out of range";
    out.priority = static_cast<int>(p);
  }
  if (j.contains("payload")) {
    if (!j["payload"].is_object()) return "field 'payload' is not an object";
    for (const auto& [k, v] : j["payload"].items()) {
      if (v.is_string()) {
        out.payload[k] = v.get<std::string>();
      } else if (v.is_number_integer()) {
        out.payload[k] = std::to_string(v.get<std::int64_t>());
      } else {
        return fmt::format("payload '{}' is not a string", k);
      }
    }
  }
  return {};
}

struct Admission {
  std::set<std::string> seen;
  Batch batch;

  void offer(EventRecord e, std::size_t line, Tick horizon) {
    if (auto reason = validate(e, horizon); !reason.empty()) {
      batch.dead_letters.push_back(DeadLetter{line, e.id, std::move(reason)});
      return;
    }
    if (!seen.insert(e.id).second) {
      batch.dead_letters.push_back(DeadLetter{line, e.id, "duplicate"});
      return;
    }
    batch.queue.push_back(std::move(e));
  }

  Batch finish() {
    std::stable_sort(batch.queue.begin(), batch.queue.end(), queue_order);
    return std::move(batch);
  }
};

std::string escape(std::string_view s, bool attribute) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += attribute ? "&quot;" : "\"";
        break;
      case '\'':
        out += attribute ? "&apos;" : "'";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::vector<Invariant> bind_triggers(const EventRecord& e, const std::vector<Invariant>& models) {
  std::vector<Invariant> out = models;
  for (const auto& [k, v] : e.payload) {
    if (k.rfind(kTriggerPrefix, 0) != 0) continue;
    const std::string event = k.substr(kTriggerPrefix.size());
    const Tick at = *dsl::parse_tick_literal(v);
    for (auto& m : out) m = checker::resolve_trigger(m, event, at);
  }
  return out;
}

std::string reach_word(bool r) { return r ? "reachable" : "unreachable"; }

Panel connectivity_panel(const EventRecord& e, const ModelSet& models, const PipelineConfig& cfg) {
  auto mapped = cfg.comm_node_of.find(e.subject_owner);
  const std::string node = mapped != cfg.comm_node_of.end() ? mapped->second : e.subject_owner;
  const auto& comm = models.comm_graph();
  const auto& site = models.site_graph();

  std::string body = fmt::format("{} as node {} at {}", e.subject_owner, node, dsl::format_clock(e.tick));
  if (comm.nodes.count(node) == 0 || comm.nodes.count(cfg.hub) == 0) {
    body += fmt::format("\n{}: not in communication graph", node);
    return Panel{"Connectivity", body, {e.subject_owner}};
  }
  const bool hub = topology::connected(comm, node, cfg.hub, e.tick);
  body += fmt::format("\n{} to {}: {}", node, cfg.hub, reach_word(hub));
  for (const auto& sc : cfg.service_centers) {
    if (site.nodes.count(sc) == 0 || site.nodes.count(cfg.site_node) == 0) {
      body += fmt::format("\n{} to {}: not in site graph", node, sc);
      continue;
    }
    const bool remote = hub && topology::connected(site, cfg.site_node, sc, e.tick);
    body += fmt::format("\n{} to {}: {}", node, sc, reach_word(remote));
  }
  return Panel{"Connectivity", body, {e.subject_owner}};
}

DisplayCommand diagnostic(const EventRecord& e, const std::string& target, const std::string& what,
                          SharedState& state) {
  state.append_history(HistoryEntry{e, fmt::format("diagnostic: {}", what)});
  return DisplayCommand{
      target,
      {Panel{"Diagnostic", fmt::format("event {}: {}", e.id, what), {e.subject_owner}}}};
}

}  // namespace

Batch ingest(const std::vector<EventRecord>& events, Tick horizon) {
  Admission a;
  for (const auto& e : events) a.offer(e, 0, horizon);
  return a.finish();
}

Batch ingest(std::istream& log, Tick horizon) {
  Admission a;
  std::string line;
  std::size_t n = 0;
  while (std::getline(log, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    EventRecord e;
    if (auto reason = decode_line(line, e); !reason.empty()) {
      a.batch.dead_letters.push_back(DeadLetter{n, e.id, std::move(reason)});
      continue;
    }
    a.offer(std::move(e), n, horizon);
  }
  return a.finish();
}

void SharedState::record_observation(const EventRecord& e) {
  std::lock_guard lock(mu_);
  observations_.push_back(e);
}

std::vector<EventRecord> SharedState::observations() const {
  std::lock_guard lock(mu_);
  return observations_;
}

void SharedState::append_history(HistoryEntry entry) {
  std::lock_guard lock(mu_);
  history_.push_back(std::move(entry));
}

std::vector<HistoryEntry> SharedState::history() const {
  std::lock_guard lock(mu_);
  return history_;
}

std::size_t SharedState::history_size() const {
  std::lock_guard lock(mu_);
  return history_.size();
}

void SharedState::set_device_status(const std::string& owner, std::string status) {
  std::lock_guard lock(mu_);
  device_status_[owner] = std::move(status);
}

std::map<std::string, std::string> SharedState::device_status() const {
  std::lock_guard lock(mu_);
  return device_status_;
}

bool confidence_gate(const EventRecord& e, const SharedState& state, int k, Tick window) {
  if (k <= 1) return true;
  int count = 1;
  for (const auto& o : state.observations()) {
    if (o.id == e.id) continue;
    if (o.source_device == e.source_device && o.kind == e.kind && o.tick <= e.tick &&
        o.tick >= e.tick - window) {
      ++count;
    }
  }
  return count >= k;
}

std::string emit_xml(const DisplayCommand& c) {
  std::string out = fmt::format("<display target=\"{}\">", escape(c.target, true));
  for (const auto& p : c.panels) {
    out += fmt::format("<panel title=\"{}\"><body>{}</body>", escape(p.title, true),
                       escape(p.body, false));
    std::vector<std::string> owners = p.related_owners;
    std::sort(owners.begin(), owners.end());
    owners.erase(std::unique(owners.begin(), owners.end()), owners.end());
    if (owners.empty()) {
      out += "<owners/>";
    } else {
      out += "<owners>";
      for (const auto& o : owners) out += fmt::format("<owner name=\"{}\"/>", escape(o, true));
      out += "</owners>";
    }
    out += "</panel>";
  }
  out += "</display>";
  return out;
}

ModelSet::ModelSet(std::vector<Invariant> models, const PipelineConfig& cfg)
    : models_(std::move(models)) {
  for (const auto& m : models_) {
    const auto owners = list_owners(m);
    auto add = [&](topology::TimeIndexedGraph& into, const std::string& owner) {
      if (owners.count(owner) == 0) return;
      auto g = topology::graph_from_model(m, owner);
      into.nodes.merge(g.nodes);
      for (auto& s : g.slices) into.slices.push_back(std::move(s));
    };
    add(comm_, cfg.comm_graph_owner);
    add(site_, cfg.site_graph_owner);
  }
}

DisplayCommand handle(const EventRecord& e, const ModelSet& models, SharedState& state,
                      const PipelineConfig& cfg) {
  auto display = e.payload.find("display");
  const std::string target = display != e.payload.end() ? display->second : "workstation";
  state.set_device_status(e.subject_owner, e.kind);

  checker::Verdict nearby;
  try {
    nearby = checker::check(checker::NearbyDevices{e.subject_owner, e.tick, cfg.nearby_radius},
                            bind_triggers(e, models.models()));
  } catch (const Error& err) {
    return diagnostic(e, target, err.what(), state);
  }

  DisplayCommand cmd;
  cmd.target = target;
  cmd.panels.push_back(Panel{
      "Incident",
      fmt::format("event {} ({}) from {}\nsubject: {}\ntick: {} ({})\npriority: {}", e.id, e.kind,
                  e.source_device, e.subject_owner, e.tick, dsl::format_clock(e.tick), e.priority),
      {e.subject_owner}});
  cmd.panels.push_back(Panel{
      "Nearby devices",
      nearby.owners.empty()
          ? fmt::format("none within distance {}", cfg.nearby_radius)
          : fmt::format("within distance {}: {}", cfg.nearby_radius, fmt::join(nearby.owners, ", ")),
      nearby.owners});
  cmd.panels.push_back(connectivity_panel(e, models, cfg));

  state.append_history(HistoryEntry{
      e, fmt::format("handled: {}", nearby.owners.empty() ? std::string("nothing nearby")
                                                          : fmt::format("nearby {}",
                                                                        fmt::join(nearby.owners, ",")))});
  return cmd;
}

ReplayResult process(const Batch& batch, const ModelSet& models, SharedState& state,
                     const PipelineConfig& cfg) {
  ReplayResult result;
  result.dead_letters = batch.dead_letters;
  const auto& queue = batch.queue;

  std::map<std::string, std::vector<std::size_t>> by_owner;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const auto& e = queue[i];
    state.record_observation(e);
    if (!confidence_gate(e, state, cfg.confidence_k, cfg.confidence_window)) {
      state.append_history(HistoryEntry{
          e, fmt::format("suppressed: fewer than {} matching events within {} ticks",
                         cfg.confidence_k, cfg.confidence_window)});
      ++result.suppressed;
      continue;
    }
    by_owner[e.subject_owner].push_back(i);
  }

  std::vector<const std::vector<std::size_t>*> groups;
  for (const auto& [owner, idx] : by_owner) groups.push_back(&idx);
  std::vector<std::optional<DisplayCommand>> out(queue.size());

  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t g = next++; g < groups.size(); g = next++) {
      try {
        for (std::size_t i : *groups[g]) out[i] = handle(queue[i], models, state, cfg);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(std::max<std::size_t>(cfg.parallelism, 1), groups.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 0; i < queue.size(); ++i) {
    if (out[i]) result.documents.push_back(Document{queue[i].id, emit_xml(*out[i])});
  }
  return result;
}

ReplayResult replay(std::istream& log, const ModelSet& models, SharedState& state,
                    const PipelineConfig& cfg) {
  return process(ingest(log, cfg.horizon), models, state, cfg);
}

std::string join_documents(const std::vector<Document>& docs) {
  std::string out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i) out += '\n';
    out += docs[i].xml;
    out += '\n';
  }
  return out;
}

std::string dead_letter_report(const std::vector<DeadLetter>& dead) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& d : dead) {
    nlohmann::ordered_json o;
    o["line"] = d.line;
    o["id"] = d.id;
    o["reason"] = d.reason;
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

}  // namespace stmc::pipeline
