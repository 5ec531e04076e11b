#pragma once

// SAT goal export for collision queries and a small DPLL solver for the
// exported CNF.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stmc/checker.hpp"
#include "stmc/geometry.hpp"

namespace stmc::dimacs {

// Exclusive upper bounds of the grid: 0 <= x < x_cells, likewise y and t.
struct Bounds {
  Coord x_cells = 0;
  Coord y_cells = 0;
  Tick ticks = 0;
};

struct OwnedPoints {
  std::string owner;
  geo::PointSet4D points;
};

// ownerIndex * X*Y*T + ((t*Y + y)*X + x) + 1
std::int64_t atom_variable(std::size_t owner_index, const geo::GridPoint& p, const Bounds& b);

// Smallest bounds holding every point; throws PointOutOfBounds for negative
// coordinates.
Bounds infer_bounds(const std::vector<OwnedPoints>& sets);

// CNF that is satisfiable iff the two owners of `query` share a cell:
//   - a unit clause per ground atom of every owner in `sets`;
//   - for each cell occupied by either query owner, a negative unit for the
//     query owner that does not occupy it;
//   - per such cell p a selector k_p (id = owners*X*Y*T + cell + 1) with
//     clauses (-k_p a_p) and (-k_p b_p);
//   - one clause (k_p1 ... k_pn), the empty clause when there is no cell.
// An empty `sets` list yields "p cnf 0 0". Throws PointOutOfBounds and
// UnknownOwner.
std::string export_collision(const std::vector<OwnedPoints>& sets,
                             const checker::CollisionAbsence& query, const Bounds& bounds);

struct Cnf {
  std::int64_t declared_vars = 0;
  std::vector<std::vector<std::int64_t>> clauses;
};

// Throws std::runtime_error on malformed input.
Cnf parse(std::string_view text);

struct SatResult {
  bool satisfiable = false;
  // Variables set true in the model found (original ids, ascending).
  std::vector<std::int64_t> true_vars;
};

// Chronological-backtracking DPLL with two-watched-literal propagation.
SatResult solve(const Cnf& cnf);

}  // namespace stmc::dimacs
