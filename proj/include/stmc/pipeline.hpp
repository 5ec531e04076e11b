#pragma once

// Offline replay of the alarm-handling bus: ingest an event log, gate on
// confidence, run per-event handlers over the models, emit XML display
// commands.

#include <cstddef>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "stmc/invariant.hpp"
#include "stmc/topology.hpp"

namespace stmc::pipeline {

struct EventRecord {
  std::string id;
  std::string source_device;
  std::string kind;
  std::string subject_owner;
  Tick tick = 0;
  int priority = 0;
  // "trigger.<event>" entries bind event-relative model times; "display"
  // selects workstation|mobile|wall.
  std::map<std::string, std::string> payload;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct DeadLetter {
  std::size_t line = 0;  // 1-based log line, 0 for in-memory events
  std::string id;
  std::string reason;
};

struct Batch {
  // Sorted by (priority desc, tick asc, id asc).
  std::vector<EventRecord> queue;
  std::vector<DeadLetter> dead_letters;
};

// Validates, deduplicates by id and sorts. Ticks beyond `horizon` are
// rejected.
Batch ingest(const std::vector<EventRecord>& events, Tick horizon);
// Newline-delimited JSON objects; blank lines are skipped.
Batch ingest(std::istream& log, Tick horizon);

struct HistoryEntry {
  EventRecord event;
  std::string summary;
};

// Shared by concurrently running handlers. Reads return snapshots.
class SharedState {
 public:
  void record_observation(const EventRecord& e);
  std::vector<EventRecord> observations() const;

  void append_history(HistoryEntry entry);
  std::vector<HistoryEntry> history() const;
  std::size_t history_size() const;

  void set_device_status(const std::string& owner, std::string status);
  std::map<std::string, std::string> device_status() const;

 private:
  mutable std::mutex mu_;
  std::vector<EventRecord> observations_;
  std::vector<HistoryEntry> history_;
  std::map<std::string, std::string> device_status_;
};

// At least k observations with e's (source_device, kind) and a tick in
// [e.tick - window, e.tick], counting e itself once.
bool confidence_gate(const EventRecord& e, const SharedState& state, int k, Tick window);

struct Panel {
  std::string title;
  std::string body;
  std::vector<std::string> related_owners;
};

struct DisplayCommand {
  std::string target = "workstation";
  std::vector<Panel> panels;
};

// <display target=".."><panel title=".."><body>..</body><owners>..</owners>
// </panel></display>, owners sorted, no declaration or whitespace.
std::string emit_xml(const DisplayCommand& c);

struct PipelineConfig {
  int confidence_k = 1;
  Tick confidence_window = 60;
  Coord nearby_radius = 5;
  std::size_t parallelism = 1;
  Tick horizon = 86399;
  std::string comm_graph_owner = "midlevelcommgraph";
  std::string site_graph_owner = "sitecommgraph";
  std::string hub = "ComHub";
  std::string site_node = "ManufacturingSite";
  std::vector<std::string> service_centers = {"ServiceCenter1", "ServiceCenter2"};
  // Geometric owner -> communication node; unmapped owners map to themselves.
  // The workpiece rides the belt, so it is reached through the belt controller.
  std::map<std::string, std::string> comm_node_of = {{"Robot2_Space", "Robot2"},
                                                     {"WorkPiece_Space", "ConvBelt"}};
};

// The models an event handler reasons over, with the graph layers built once.
class ModelSet {
 public:
  ModelSet(std::vector<Invariant> models, const PipelineConfig& cfg);

  const std::vector<Invariant>& models() const { return models_; }
  const topology::TimeIndexedGraph& comm_graph() const { return comm_; }
  const topology::TimeIndexedGraph& site_graph() const { return site_; }

 private:
  std::vector<Invariant> models_;
  topology::TimeIndexedGraph comm_;
  topology::TimeIndexedGraph site_;
};

// Incident summary, nearby devices and connectivity panels; a single
// diagnostic panel when the subject is unknown or the models cannot be
// grounded. Always appends to the history.
DisplayCommand handle(const EventRecord& e, const ModelSet& models, SharedState& state,
                      const PipelineConfig& cfg);

struct Document {
  std::string event_id;
  std::string xml;
};

struct ReplayResult {
  std::vector<Document> documents;  // queue order
  std::vector<DeadLetter> dead_letters;
  std::size_t suppressed = 0;
};

// Gate in queue order, then handle: concurrent across subject owners,
// serialized per owner. Output order does not depend on scheduling.
ReplayResult process(const Batch& batch, const ModelSet& models, SharedState& state,
                     const PipelineConfig& cfg);
ReplayResult replay(std::istream& log, const ModelSet& models, SharedState& state,
                    const PipelineConfig& cfg);

// Documents separated by a blank line.
std::string join_documents(const std::vector<Document>& docs);

// JSON array of {line, id, reason}.
std::string dead_letter_report(const std::vector<DeadLetter>& dead);

}  // namespace stmc::pipeline
