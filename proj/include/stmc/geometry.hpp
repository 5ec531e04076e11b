#pragma once

// Integer-grid occupancy geometry. A region is the set of integer points it
// contains; boundaries are closed.

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "stmc/invariant.hpp"

namespace stmc::geo {

struct Pt {
  Coord x = 0;
  Coord y = 0;
  friend bool operator==(const Pt&, const Pt&) = default;
};

// Corner-sorted: x1 <= x2, y1 <= y2.
struct Box {
  Coord x1 = 0;
  Coord y1 = 0;
  Coord x2 = 0;
  Coord y2 = 0;
  friend bool operator==(const Box&, const Box&) = default;
};

struct Circle {
  Coord cx = 0;
  Coord cy = 0;
  Coord r = 0;
  friend bool operator==(const Circle&, const Circle&) = default;
};

struct Region;

// Non-empty.
struct Union {
  std::vector<Region> members;
  friend bool operator==(const Union&, const Union&);
};

struct Region {
  std::variant<Pt, Box, Circle, Union> shape;

  Region() = default;
  Region(Pt p) : shape(p) {}
  Region(Box b) : shape(b) {}
  Region(Circle c) : shape(c) {}
  Region(Union u) : shape(std::move(u)) {}

  friend bool operator==(const Region&, const Region&) = default;
};

inline bool operator==(const Union& a, const Union& b) { return a.members == b.members; }

enum class Approx { Over, Under };

// Sorts the corners.
Box make_box(Coord x1, Coord y1, Coord x2, Coord y2);

Region region_from_atom(const AtomValue& occupancy);
AtomValue to_atom(const Box& b);

Box bounding_box(const Region& r);
Box bounding_box(const Box& a, const Box& b);

// Number of integer points.
std::int64_t point_count(const Region& r);

// Largest s with s*s <= n, n >= 0.
Coord isqrt(Coord n);

bool contains_point(const Region& r, Coord x, Coord y);

// Some integer point lies in both.
bool intersects(const Region& a, const Region& b);

// Every integer point of inner lies in outer.
bool includes(const Region& outer, const Region& inner);

// A box (or the point itself) that includes r.
Region overapprox(const Region& r);

// A region included in r: circles shrink to the largest inscribed
// axis-aligned square, unions to the best single member.
Region underapprox(const Region& r);

// ---------------------------------------------------------------------------
// Point sets
// ---------------------------------------------------------------------------

// Ordered by (t, x, y, z); z is always 0 for the 2-D models handled here.
struct GridPoint {
  Coord x = 0;
  Coord y = 0;
  Coord z = 0;
  Tick t = 0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
  friend std::strong_ordering operator<=>(const GridPoint& a, const GridPoint& b) {
    if (auto c = a.t <=> b.t; c != 0) return c;
    if (auto c = a.x <=> b.x; c != 0) return c;
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.z <=> b.z;
  }
};

class PointSet4D {
 public:
  using const_iterator = std::set<GridPoint>::const_iterator;

  PointSet4D() = default;
  PointSet4D(std::initializer_list<GridPoint> pts) : pts_(pts) {}

  void insert(const GridPoint& p) { pts_.insert(p); }
  void merge(const PointSet4D& other) { pts_.insert(other.pts_.begin(), other.pts_.end()); }

  bool contains(const GridPoint& p) const { return pts_.count(p) != 0; }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  const_iterator begin() const { return pts_.begin(); }
  const_iterator end() const { return pts_.end(); }

  // Points at tick t.
  PointSet4D at(Tick t) const;

  friend bool operator==(const PointSet4D&, const PointSet4D&) = default;

 private:
  std::set<GridPoint> pts_;
};

PointSet4D intersection(const PointSet4D& a, const PointSet4D& b);
bool is_subset(const PointSet4D& sub, const PointSet4D& super);

// Cells of resolution x resolution grid points aligned to the origin; cell
// (i, j) holds x in [i*res, i*res + res - 1] and likewise for y. Over keeps
// every cell meeting r, Under keeps cells inside r. Each kept cell becomes
// (i, j, 0, t).
PointSet4D discretize(const Region& r, Tick t, Coord resolution, Approx mode);

// The integer points of cell (i, j).
Box cell_box(Coord i, Coord j, Coord resolution);

}  // namespace stmc::geo
