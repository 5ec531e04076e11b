#include "stmc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stmc/detail/overloaded.hpp"

namespace stmc::geo {

namespace {

using detail::Overloaded;

struct Span {
  Coord a;
  Coord b;
};

Coord floor_div(Coord a, Coord b) {
  Coord q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Integer points of r on row y, as closed x-intervals (unsorted for unions).
void row_spans(const Region& r, Coord y, std::vector<Span>& out) {
  std::visit(Overloaded{
                 [&](const Pt& p) {
                   if (p.y == y) out.push_back({p.x, p.x});
                 },
                 [&](const Box& b) {
                   if (b.y1 <= y && y <= b.y2) out.push_back({b.x1, b.x2});
                 },
                 [&](const Circle& c) {
                   const Coord dy = y - c.cy;
                   const Coord rest = c.r * c.r - dy * dy;
                   if (rest < 0) return;
                   const Coord w = isqrt(rest);
                   out.push_back({c.cx - w, c.cx + w});
                 },
                 [&](const Union& u) {
                   for (const auto& m : u.members) row_spans(m, y, out);
                 },
             },
             r.shape);
}

// Sorted, merged (adjacent integer spans fuse).
std::vector<Span> merged_row(const Region& r, Coord y) {
  std::vector<Span> spans;
  row_spans(r, y, spans);
  std::sort(spans.begin(), spans.end(), [](Span l, Span rr) { return l.a < rr.a; });
  std::vector<Span> out;
  for (const auto& s : spans) {
    if (!out.empty() && s.a <= out.back().b + 1) {
      out.back().b = std::max(out.back().b, s.b);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

bool spans_cover(const std::vector<Span>& merged, Span s) {
  for (const auto& m : merged) {
    if (m.a <= s.a && s.b <= m.b) return true;
  }
  return false;
}

bool box_box(const Box& a, const Box& b) {
  return a.x1 <= b.x2 && b.x1 <= a.x2 && a.y1 <= b.y2 && b.y1 <= a.y2;
}

bool box_circle(const Box& b, const Circle& c) {
  const Coord qx = std::clamp(c.cx, b.x1, b.x2);
  const Coord qy = std::clamp(c.cy, b.y1, b.y2);
  const Coord dx = qx - c.cx;
  const Coord dy = qy - c.cy;
  return dx * dx + dy * dy <= c.r * c.r;
}

bool circle_circle(const Circle& a, const Circle& b) {
  const Coord dx = a.cx - b.cx;
  const Coord dy = a.cy - b.cy;
  const Coord rs = a.r + b.r;
  if (dx * dx + dy * dy > rs * rs) return false;
  // Discs may meet only between grid points; look for an integer witness.
  const Coord y_lo = std::max(a.cy - a.r, b.cy - b.r);
  const Coord y_hi = std::min(a.cy + a.r, b.cy + b.r);
  for (Coord y = y_lo; y <= y_hi; ++y) {
    const Coord wa = isqrt(a.r * a.r - (y - a.cy) * (y - a.cy));
    const Coord wb = isqrt(b.r * b.r - (y - b.cy) * (y - b.cy));
    if (a.cx - wa <= b.cx + wb && b.cx - wb <= a.cx + wa) return true;
  }
  return false;
}

Box circle_bounds(const Circle& c) { return Box{c.cx - c.r, c.cy - c.r, c.cx + c.r, c.cy + c.r}; }

bool box_inside_box(const Box& outer, const Box& inner) {
  return outer.x1 <= inner.x1 && inner.x2 <= outer.x2 && outer.y1 <= inner.y1 &&
         inner.y2 <= outer.y2;
}

}  // namespace

Coord isqrt(Coord n) {
  if (n <= 0) return 0;
  auto s = static_cast<Coord>(std::sqrt(static_cast<double>(n)));
  while (s * s > n) --s;
  while ((s + 1) * (s + 1) <= n) ++s;
  return s;
}

Box make_box(Coord x1, Coord y1, Coord x2, Coord y2) {
  return Box{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
}

Region region_from_atom(const AtomValue& occupancy) {
  if (const auto* p = std::get_if<OccupyPoint>(&occupancy)) return Pt{p->x, p->y};
  if (const auto* b = std::get_if<OccupyBox>(&occupancy)) return make_box(b->x1, b->y1, b->x2, b->y2);
  if (const auto* c = std::get_if<OccupyCircle>(&occupancy)) return Circle{c->cx, c->cy, c->radius};
  throw std::invalid_argument("region_from_atom: not an occupancy atom");
}

AtomValue to_atom(const Box& b) { return OccupyBox{b.x1, b.y1, b.x2, b.y2}; }

Box bounding_box(const Box& a, const Box& b) {
  return Box{std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2),
             std::max(a.y2, b.y2)};
}

Box bounding_box(const Region& r) {
  return std::visit(Overloaded{
                        [](const Pt& p) { return Box{p.x, p.y, p.x, p.y}; },
                        [](const Box& b) { return b; },
                        [](const Circle& c) { return circle_bounds(c); },
                        [](const Union& u) {
                          Box acc = bounding_box(u.members.at(0));
                          for (const auto& m : u.members) acc = bounding_box(acc, bounding_box(m));
                          return acc;
                        },
                    },
                    r.shape);
}

std::int64_t point_count(const Region& r) {
  if (const auto* b = std::get_if<Box>(&r.shape)) return (b->x2 - b->x1 + 1) * (b->y2 - b->y1 + 1);
  if (std::holds_alternative<Pt>(r.shape)) return 1;
  const Box bb = bounding_box(r);
  std::int64_t n = 0;
  for (Coord y = bb.y1; y <= bb.y2; ++y) {
    for (const auto& s : merged_row(r, y)) n += s.b - s.a + 1;
  }
  return n;
}

bool contains_point(const Region& r, Coord x, Coord y) {
  return std::visit(Overloaded{
                        [&](const Pt& p) { return p.x == x && p.y == y; },
                        [&](const Box& b) { return b.x1 <= x && x <= b.x2 && b.y1 <= y && y <= b.y2; },
                        [&](const Circle& c) {
                          const Coord dx = x - c.cx;
                          const Coord dy = y - c.cy;
                          return dx * dx + dy * dy <= c.r * c.r;
                        },
                        [&](const Union& u) {
                          return std::any_of(u.members.begin(), u.members.end(),
                                             [&](const Region& m) { return contains_point(m, x, y); });
                        },
                    },
                    r.shape);
}

bool intersects(const Region& a, const Region& b) {
  if (const auto* u = std::get_if<Union>(&a.shape)) {
    return std::any_of(u->members.begin(), u->members.end(),
                       [&](const Region& m) { return intersects(m, b); });
  }
  if (const auto* u = std::get_if<Union>(&b.shape)) {
    return std::any_of(u->members.begin(), u->members.end(),
                       [&](const Region& m) { return intersects(a, m); });
  }
  if (const auto* p = std::get_if<Pt>(&a.shape)) return contains_point(b, p->x, p->y);
  if (const auto* p = std::get_if<Pt>(&b.shape)) return contains_point(a, p->x, p->y);

  const auto* ba = std::get_if<Box>(&a.shape);
  const auto* bb = std::get_if<Box>(&b.shape);
  const auto* ca = std::get_if<Circle>(&a.shape);
  const auto* cb = std::get_if<Circle>(&b.shape);
  if (ba && bb) return box_box(*ba, *bb);
  if (ba && cb) return box_circle(*ba, *cb);
  if (ca && bb) return box_circle(*bb, *ca);
  return circle_circle(*ca, *cb);
}

bool includes(const Region& outer, const Region& inner) {
  if (const auto* u = std::get_if<Union>(&inner.shape)) {
    return std::all_of(u->members.begin(), u->members.end(),
                       [&](const Region& m) { return includes(outer, m); });
  }
  if (const auto* p = std::get_if<Pt>(&inner.shape)) return contains_point(outer, p->x, p->y);

  if (const auto* ob = std::get_if<Box>(&outer.shape)) {
    // A circle's integer extent reaches exactly cx +- r and cy +- r.
    return box_inside_box(*ob, bounding_box(inner));
  }
  if (const auto* oc = std::get_if<Circle>(&outer.shape)) {
    if (const auto* ib = std::get_if<Box>(&inner.shape)) {
      const Region o = *oc;
      return contains_point(o, ib->x1, ib->y1) && contains_point(o, ib->x1, ib->y2) &&
             contains_point(o, ib->x2, ib->y1) && contains_point(o, ib->x2, ib->y2);
    }
  }
  // Row-by-row coverage of inner's spans by outer's spans.
  const Box ib = bounding_box(inner);
  std::vector<Span> spans;
  for (Coord y = ib.y1; y <= ib.y2; ++y) {
    spans.clear();
    row_spans(inner, y, spans);
    if (spans.empty()) continue;
    const auto cover = merged_row(outer, y);
    for (const auto& s : spans) {
      if (!spans_cover(cover, s)) return false;
    }
  }
  return true;
}

Region overapprox(const Region& r) {
  return std::visit(Overloaded{
                        [&](const Pt&) { return r; },
                        [&](const Box&) { return r; },
                        [](const Circle& c) { return Region{circle_bounds(c)}; },
                        [&](const Union&) { return Region{bounding_box(r)}; },
                    },
                    r.shape);
}

Region underapprox(const Region& r) {
  return std::visit(Overloaded{
                        [&](const Pt&) { return r; },
                        [&](const Box&) { return r; },
                        [](const Circle& c) {
                          // Largest s with 2 s^2 <= r^2, i.e. floor(r / sqrt 2).
                          const Coord s = isqrt((c.r * c.r) / 2);
                          return Region{Box{c.cx - s, c.cy - s, c.cx + s, c.cy + s}};
                        },
                        [](const Union& u) {
                          Region best = underapprox(u.members.at(0));
                          std::int64_t best_n = point_count(best);
                          for (std::size_t i = 1; i < u.members.size(); ++i) {
                            Region cand = underapprox(u.members[i]);
                            const std::int64_t n = point_count(cand);
                            if (n > best_n) {
                              best = std::move(cand);
                              best_n = n;
                            }
                          }
                          return best;
                        },
                    },
                    r.shape);
}

PointSet4D PointSet4D::at(Tick t) const {
  PointSet4D out;
  auto lo = pts_.lower_bound(GridPoint{std::numeric_limits<Coord>::min(),
                                       std::numeric_limits<Coord>::min(),
                                       std::numeric_limits<Coord>::min(), t});
  for (auto it = lo; it != pts_.end() && it->t == t; ++it) out.pts_.insert(out.pts_.end(), *it);
  return out;
}

PointSet4D intersection(const PointSet4D& a, const PointSet4D& b) {
  PointSet4D out;
  const PointSet4D& small = a.size() <= b.size() ? a : b;
  const PointSet4D& large = a.size() <= b.size() ? b : a;
  for (const auto& p : small) {
    if (large.contains(p)) out.insert(p);
  }
  return out;
}

bool is_subset(const PointSet4D& sub, const PointSet4D& super) {
  return std::all_of(sub.begin(), sub.end(), [&](const GridPoint& p) { return super.contains(p); });
}

Box cell_box(Coord i, Coord j, Coord resolution) {
  return Box{i * resolution, j * resolution, i * resolution + resolution - 1,
             j * resolution + resolution - 1};
}

PointSet4D discretize(const Region& r, Tick t, Coord resolution, Approx mode) {
  if (resolution < 1) throw std::invalid_argument("discretize: resolution must be >= 1");
  const Box bb = bounding_box(r);
  PointSet4D out;
  const Coord i_lo = floor_div(bb.x1, resolution);
  const Coord i_hi = floor_div(bb.x2, resolution);
  const Coord j_lo = floor_div(bb.y1, resolution);
  const Coord j_hi = floor_div(bb.y2, resolution);
  for (Coord i = i_lo; i <= i_hi; ++i) {
    for (Coord j = j_lo; j <= j_hi; ++j) {
      const Region cell = cell_box(i, j, resolution);
      const bool keep = mode == Approx::Over ? intersects(r, cell) : includes(r, cell);
      if (keep) out.insert(GridPoint{i, j, 0, t});
    }
  }
  return out;
}

}  // namespace stmc::geo
