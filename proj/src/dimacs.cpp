#include "stmc/dimacs.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "stmc/errors.hpp"

namespace stmc::dimacs {

namespace {

std::int64_t cell_index(const geo::GridPoint& p, const Bounds& b) {
  return (p.t * b.y_cells + p.y) * b.x_cells + p.x;
}

void check_in_bounds(const geo::GridPoint& p, const Bounds& b, const std::string& owner) {
  if (p.x < 0 || p.x >= b.x_cells || p.y < 0 || p.y >= b.y_cells || p.t < 0 || p.t >= b.ticks) {
    throw PointOutOfBounds(fmt::format("point ({}, {}, {}) of '{}' outside bounds ({}, {}, {})", p.x,
                                       p.y, p.t, owner, b.x_cells, b.y_cells, b.ticks));
  }
}

std::size_t index_of(const std::vector<OwnedPoints>& sets, const std::string& owner) {
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].owner == owner) return i;
  }
  throw UnknownOwner(fmt::format("owner '{}' not among exported sets", owner));
}

}  // namespace

std::int64_t atom_variable(std::size_t owner_index, const geo::GridPoint& p, const Bounds& b) {
  const std::int64_t block = b.x_cells * b.y_cells * b.ticks;
  return static_cast<std::int64_t>(owner_index) * block + cell_index(p, b) + 1;
}

Bounds infer_bounds(const std::vector<OwnedPoints>& sets) {
  Bounds b;
  for (const auto& s : sets) {
    for (const auto& p : s.points) {
      if (p.x < 0 || p.y < 0 || p.t < 0) {
        throw PointOutOfBounds(fmt::format("point ({}, {}, {}) of '{}' has a negative coordinate",
                                           p.x, p.y, p.t, s.owner));
      }
      b.x_cells = std::max(b.x_cells, p.x + 1);
      b.y_cells = std::max(b.y_cells, p.y + 1);
      b.ticks = std::max(b.ticks, p.t + 1);
    }
  }
  return b;
}

std::string export_collision(const std::vector<OwnedPoints>& sets,
                             const checker::CollisionAbsence& query, const Bounds& bounds) {
  if (sets.empty()) return "p cnf 0 0\n";
  const std::size_t ia = index_of(sets, query.owner_a);
  const std::size_t ib = index_of(sets, query.owner_b);
  for (const auto& s : sets) {
    for (const auto& p : s.points) check_in_bounds(p, bounds, s.owner);
  }

  const std::int64_t selector_base =
      static_cast<std::int64_t>(sets.size()) * bounds.x_cells * bounds.y_cells * bounds.ticks;
  std::vector<std::vector<std::int64_t>> clauses;
  std::int64_t max_var = 0;
  auto emit = [&](std::vector<std::int64_t> c) {
    for (auto l : c) max_var = std::max(max_var, l < 0 ? -l : l);
    clauses.push_back(std::move(c));
  };

  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (const auto& p : sets[i].points) emit({atom_variable(i, p, bounds)});
  }

  geo::PointSet4D candidates = sets[ia].points;
  candidates.merge(sets[ib].points);
  const geo::PointSet4D* occupied[2] = {&sets[ia].points, &sets[ib].points};
  const std::size_t owner_idx[2] = {ia, ib};
  for (const auto& p : candidates) {
    for (int k = 0; k < 2; ++k) {
      if (!occupied[k]->contains(p)) emit({-atom_variable(owner_idx[k], p, bounds)});
    }
  }
  std::vector<std::int64_t> any_collision;
  for (const auto& p : candidates) {
    const std::int64_t sel = selector_base + cell_index(p, bounds) + 1;
    emit({-sel, atom_variable(ia, p, bounds)});
    emit({-sel, atom_variable(ib, p, bounds)});
    any_collision.push_back(sel);
  }
  emit(std::move(any_collision));

  std::string out = fmt::format("p cnf {} {}\n", max_var, clauses.size());
  for (const auto& c : clauses) {
    for (auto l : c) {
      out += std::to_string(l);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

Cnf parse(std::string_view text) {
  Cnf cnf;
  bool header = false;
  std::int64_t declared_clauses = 0;
  std::vector<std::int64_t> current;
  std::size_t pos = 0;
  auto skip_line = [&] {
    while (pos < text.size() && text[pos] != '\n') ++pos;
  };
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++pos;
      continue;
    }
    if (c == 'c' || c == '%') {
      skip_line();
      continue;
    }
    if (c == 'p') {
      if (header) throw std::runtime_error("dimacs: duplicate header");
      const std::size_t start = pos;
      skip_line();
      std::istringstream hs(std::string(text.substr(start, pos - start)));
      std::string p, fmt_name;
      hs >> p >> fmt_name >> cnf.declared_vars >> declared_clauses;
      if (!hs || fmt_name != "cnf" || cnf.declared_vars < 0 || declared_clauses < 0) {
        throw std::runtime_error("dimacs: malformed header");
      }
      header = true;
      continue;
    }
    if (!header) throw std::runtime_error("dimacs: clause before header");
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t' && text[end] != '\n' &&
           text[end] != '\r') {
      ++end;
    }
    std::int64_t lit = 0;
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + end, lit);
    if (ec != std::errc{} || p != text.data() + end) {
      throw std::runtime_error(fmt::format("dimacs: bad literal '{}'", text.substr(pos, end - pos)));
    }
    pos = end;
    if (lit == 0) {
      cnf.clauses.push_back(std::move(current));
      current.clear();
    } else {
      if (std::abs(lit) > cnf.declared_vars) throw std::runtime_error("dimacs: literal exceeds header");
      current.push_back(lit);
    }
  }
  if (!header) throw std::runtime_error("dimacs: missing header");
  if (!current.empty()) throw std::runtime_error("dimacs: unterminated clause");
  if (static_cast<std::int64_t>(cnf.clauses.size()) != declared_clauses) {
    throw std::runtime_error("dimacs: clause count does not match header");
  }
  return cnf;
}

namespace {

// Dense-variable DPLL. Literal l of variable v is 2v (positive) or 2v+1.
class Dpll {
 public:
  explicit Dpll(const Cnf& cnf) {
    std::unordered_map<std::int64_t, int> dense;
    for (const auto& c : cnf.clauses) {
      if (c.empty()) {
        trivially_unsat_ = true;
        return;
      }
      std::vector<int> lits;
      for (auto l : c) {
        const std::int64_t v = l < 0 ? -l : l;
        auto [it, fresh] = dense.emplace(v, static_cast<int>(original_.size()));
        if (fresh) original_.push_back(v);
        lits.push_back(2 * it->second + (l < 0 ? 1 : 0));
      }
      // Sorted, a literal and its negation (2v, 2v+1) are neighbours.
      std::sort(lits.begin(), lits.end());
      lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
      bool tautology = false;
      for (std::size_t i = 1; i < lits.size(); ++i) tautology = tautology || (lits[i] ^ 1) == lits[i - 1];
      if (!tautology) clauses_.push_back(std::move(lits));
    }
    value_.assign(original_.size(), kUnassigned);
    watches_.resize(2 * original_.size());
    search_from_.assign(clauses_.size(), 2);
    for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
      const auto& c = clauses_[ci];
      if (c.size() == 1) {
        units_.push_back(c[0]);
      } else {
        watches_[c[0]].push_back(ci);
        watches_[c[1]].push_back(ci);
      }
    }
  }

  SatResult run() {
    SatResult r;
    if (trivially_unsat_) return r;
    for (int u : units_) {
      if (is_false(u)) return r;
      if (!is_true(u)) assign(u);
    }
    std::size_t next_var = 0;
    while (true) {
      if (!propagate()) {
        // Flip the most recent unflipped decision.
        while (!decisions_.empty() && decisions_.back().flipped) {
          undo_to(decisions_.back().trail_size);
          decisions_.pop_back();
        }
        if (decisions_.empty()) return r;
        Decision& d = decisions_.back();
        undo_to(d.trail_size);
        d.flipped = true;
        assign(d.lit ^ 1);
        next_var = 0;
        continue;
      }
      while (next_var < value_.size() && value_[next_var] != kUnassigned) ++next_var;
      if (next_var == value_.size()) break;
      const int lit = 2 * static_cast<int>(next_var) + 1;  // try false first
      decisions_.push_back(Decision{trail_.size(), lit, false});
      assign(lit);
    }
    r.satisfiable = true;
    for (std::size_t v = 0; v < value_.size(); ++v) {
      if (value_[v] == kTrue) r.true_vars.push_back(original_[v]);
    }
    std::sort(r.true_vars.begin(), r.true_vars.end());
    return r;
  }

 private:
  static constexpr signed char kUnassigned = -1;
  static constexpr signed char kFalse = 0;
  static constexpr signed char kTrue = 1;

  struct Decision {
    std::size_t trail_size;
    int lit;
    bool flipped;
  };

  bool is_true(int lit) const {
    const auto v = value_[lit >> 1];
    return v != kUnassigned && (v == kTrue) == ((lit & 1) == 0);
  }
  bool is_false(int lit) const {
    const auto v = value_[lit >> 1];
    return v != kUnassigned && (v == kTrue) != ((lit & 1) == 0);
  }

  void assign(int lit) {
    value_[lit >> 1] = (lit & 1) ? kFalse : kTrue;
    trail_.push_back(lit);
  }

  void undo_to(std::size_t size) {
    while (trail_.size() > size) {
      value_[trail_.back() >> 1] = kUnassigned;
      trail_.pop_back();
    }
    head_ = std::min(head_, trail_.size());
  }

  // False on conflict.
  bool propagate() {
    while (head_ < trail_.size()) {
      const int falsified = trail_[head_++] ^ 1;
      auto& ws = watches_[falsified];
      std::size_t keep = 0;
      bool conflict = false;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        const std::size_t ci = ws[i];
        if (conflict) {
          ws[keep++] = ci;
          continue;
        }
        auto& c = clauses_[ci];
        if (c[0] == falsified) std::swap(c[0], c[1]);
        if (is_true(c[0])) {
          ws[keep++] = ci;
          continue;
        }
        // Resume the replacement search where the last one stopped, so long
        // clauses are not rescanned from the start on every falsification.
        bool moved = false;
        const std::size_t n = c.size();
        if (n > 2) {
          std::size_t k = search_from_[ci];
          for (std::size_t step = 0; step < n - 2; ++step, k = k + 1 < n ? k + 1 : 2) {
            if (!is_false(c[k])) {
              std::swap(c[1], c[k]);
              watches_[c[1]].push_back(ci);
              search_from_[ci] = k;
              moved = true;
              break;
            }
          }
        }
        if (moved) continue;
        ws[keep++] = ci;
        if (is_false(c[0])) {
          conflict = true;
        } else {
          assign(c[0]);
        }
      }
      ws.resize(keep);
      if (conflict) return false;
    }
    return true;
  }

  bool trivially_unsat_ = false;
  std::vector<std::int64_t> original_;
  std::vector<std::vector<int>> clauses_;
  std::vector<int> units_;
  std::vector<std::vector<std::size_t>> watches_;
  std::vector<std::size_t> search_from_;
  std::vector<signed char> value_;
  std::vector<int> trail_;
  std::size_t head_ = 0;
  std::vector<Decision> decisions_;
};

}  // namespace

SatResult solve(const Cnf& cnf) { return Dpll(cnf).run(); }

}  // namespace stmc::dimacs
