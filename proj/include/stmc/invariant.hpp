#pragma once

// The model language: invariants built from logical connectives over
// spatio-temporal atoms. Values are immutable; children are shared.

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stmc {

using Tick = std::int64_t;
using Coord = std::int64_t;

inline constexpr Tick kTicksPerDay = 86400;

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

// `clock` is a print hint (the literal was written as TStandardGMTDay). It
// does not take part in equality.
struct TimePoint {
  Tick t = 0;
  bool clock = false;
  friend bool operator==(const TimePoint& a, const TimePoint& b) { return a.t == b.t; }
};

// Inclusive on both ends.
struct TimeInterval {
  Tick from = 0;
  Tick to = 0;
  bool clock = false;
  friend bool operator==(const TimeInterval& a, const TimeInterval& b) {
    return a.from == b.from && a.to == b.to;
  }
};

// A tick offset measured from the occurrence of a named trigger event.
struct EventRelativeTime {
  std::string event;
  Tick offset = 0;
  friend bool operator==(const EventRelativeTime&, const EventRelativeTime&) = default;
};

struct TimeStamp {
  EventRelativeTime ert;
  friend bool operator==(const TimeStamp&, const TimeStamp&) = default;
};

struct Event {
  std::string name;
  friend bool operator==(const Event&, const Event&) = default;
};

struct Owner {
  std::string name;
  friend bool operator==(const Owner&, const Owner&) = default;
};

struct Prob {
  double p = 0.0;
  friend bool operator==(const Prob&, const Prob&) = default;
};

struct ComponentState {
  std::string state;
  friend bool operator==(const ComponentState&, const ComponentState&) = default;
};

struct OccupyPoint {
  Coord x = 0;
  Coord y = 0;
  friend bool operator==(const OccupyPoint&, const OccupyPoint&) = default;
};

struct OccupyBox {
  Coord x1 = 0;
  Coord y1 = 0;
  Coord x2 = 0;
  Coord y2 = 0;
  friend bool operator==(const OccupyBox&, const OccupyBox&) = default;
};

struct OccupyCircle {
  Coord cx = 0;
  Coord cy = 0;
  Coord radius = 0;
  friend bool operator==(const OccupyCircle&, const OccupyCircle&) = default;
};

struct Edge {
  std::string source;
  std::string target;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Transition {
  std::string source;
  std::string event;
  std::string target;
  friend bool operator==(const Transition&, const Transition&) = default;
};

struct TrueAtom {
  friend bool operator==(const TrueAtom&, const TrueAtom&) = default;
};

struct FalseAtom {
  friend bool operator==(const FalseAtom&, const FalseAtom&) = default;
};

using AtomValue = std::variant<TimePoint, TimeInterval, TimeStamp, Event, Owner, Prob,
                               ComponentState, OccupyPoint, OccupyBox, OccupyCircle, Edge,
                               Transition, TrueAtom, FalseAtom>;

bool is_time_atom(const AtomValue& a);
bool is_occupancy_atom(const AtomValue& a);

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

struct Node;

// Handle to an immutable term tree. Copying is cheap; equality is structural.
class Invariant {
 public:
  // TRUE.
  Invariant();
  explicit Invariant(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node& node() const { return *node_; }

  // Null when the term is not an atom.
  const AtomValue* as_atom() const;
  template <typename T>
  const T* atom_if() const {
    const AtomValue* a = as_atom();
    return a ? std::get_if<T>(a) : nullptr;
  }
  template <typename T>
  const T* term_if() const;

  friend bool operator==(const Invariant& a, const Invariant& b);

 private:
  std::shared_ptr<const Node> node_;
};

struct And {
  Invariant left;
  Invariant right;
};
struct Or {
  Invariant left;
  Invariant right;
};
struct Not {
  Invariant term;
};
struct Implies {
  Invariant antecedent;
  Invariant consequent;
};
// Ordered; an empty BigAnd means TRUE.
struct BigAnd {
  std::vector<Invariant> terms;
};

struct Node {
  std::variant<And, Or, Not, Implies, BigAnd, AtomValue> value;
};

template <typename T>
const T* Invariant::term_if() const {
  return std::get_if<T>(&node_->value);
}

Invariant make_atom(AtomValue a);
Invariant make_and(Invariant left, Invariant right);
Invariant make_or(Invariant left, Invariant right);
Invariant make_not(Invariant term);
Invariant make_implies(Invariant antecedent, Invariant consequent);
Invariant make_big_and(std::vector<Invariant> terms);

inline Invariant true_term() { return make_atom(TrueAtom{}); }
inline Invariant false_term() { return make_atom(FalseAtom{}); }

// Pre-order visit of every atom.
void for_each_atom(const Invariant& m, const std::function<void(const AtomValue&)>& fn);

// Number of nodes in the tree.
std::size_t term_size(const Invariant& m);

// ---------------------------------------------------------------------------
// Normalization and ownership
// ---------------------------------------------------------------------------

// Bottom-up rewrite: corner-sorted boxes, flattened BigAnd (order kept),
// Implies(TRUE, x) -> x, And/Or identities with TRUE/FALSE. Idempotent.
Invariant normalize(const Invariant& m);

// The sub-model guarded by Implies(Owner(owner), ...), guards stripped.
// Content outside any Owner guard is dropped; nested guards attribute to the
// innermost owner. TRUE when owner does not occur.
Invariant filter_by_owner(const Invariant& m, std::string_view owner);

std::set<std::string> list_owners(const Invariant& m);

}  // namespace stmc
