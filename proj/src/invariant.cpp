#include "stmc/invariant.hpp"

#include "stmc/detail/overloaded.hpp"

#include <algorithm>
#include <optional>
#include <utility>

namespace stmc {

namespace {

using detail::Overloaded;

Invariant make_node(Node n) { return Invariant(std::make_shared<const Node>(std::move(n))); }

bool is_true(const Invariant& m) { return m.atom_if<TrueAtom>() != nullptr; }
bool is_false(const Invariant& m) { return m.atom_if<FalseAtom>() != nullptr; }

}  // namespace

bool is_time_atom(const AtomValue& a) {
  return std::holds_alternative<TimePoint>(a) || std::holds_alternative<TimeInterval>(a) ||
         std::holds_alternative<TimeStamp>(a);
}

bool is_occupancy_atom(const AtomValue& a) {
  return std::holds_alternative<OccupyPoint>(a) || std::holds_alternative<OccupyBox>(a) ||
         std::holds_alternative<OccupyCircle>(a);
}

Invariant::Invariant() : node_(std::make_shared<const Node>(Node{AtomValue{TrueAtom{}}})) {}

const AtomValue* Invariant::as_atom() const { return std::get_if<AtomValue>(&node_->value); }

bool operator==(const Invariant& a, const Invariant& b) {
  if (a.node_ == b.node_) return true;
  const auto& va = a.node_->value;
  const auto& vb = b.node_->value;
  if (va.index() != vb.index()) return false;
  return std::visit(
      Overloaded{
          [&](const And& x) {
            const auto& y = std::get<And>(vb);
            return x.left == y.left && x.right == y.right;
          },
          [&](const Or& x) {
            const auto& y = std::get<Or>(vb);
            return x.left == y.left && x.right == y.right;
          },
          [&](const Not& x) { return x.term == std::get<Not>(vb).term; },
          [&](const Implies& x) {
            const auto& y = std::get<Implies>(vb);
            return x.antecedent == y.antecedent && x.consequent == y.consequent;
          },
          [&](const BigAnd& x) { return x.terms == std::get<BigAnd>(vb).terms; },
          [&](const AtomValue& x) { return x == std::get<AtomValue>(vb); },
      },
      va);
}

Invariant make_atom(AtomValue a) { return make_node(Node{std::move(a)}); }
Invariant make_and(Invariant left, Invariant right) {
  return make_node(Node{And{std::move(left), std::move(right)}});
}
Invariant make_or(Invariant left, Invariant right) {
  return make_node(Node{Or{std::move(left), std::move(right)}});
}
Invariant make_not(Invariant term) { return make_node(Node{Not{std::move(term)}}); }
Invariant make_implies(Invariant antecedent, Invariant consequent) {
  return make_node(Node{Implies{std::move(antecedent), std::move(consequent)}});
}
Invariant make_big_and(std::vector<Invariant> terms) {
  return make_node(Node{BigAnd{std::move(terms)}});
}

void for_each_atom(const Invariant& m, const std::function<void(const AtomValue&)>& fn) {
  std::visit(Overloaded{
                 [&](const And& x) {
                   for_each_atom(x.left, fn);
                   for_each_atom(x.right, fn);
                 },
                 [&](const Or& x) {
                   for_each_atom(x.left, fn);
                   for_each_atom(x.right, fn);
                 },
                 [&](const Not& x) { for_each_atom(x.term, fn); },
                 [&](const Implies& x) {
                   for_each_atom(x.antecedent, fn);
                   for_each_atom(x.consequent, fn);
                 },
                 [&](const BigAnd& x) {
                   for (const auto& t : x.terms) for_each_atom(t, fn);
                 },
                 [&](const AtomValue& a) { fn(a); },
             },
             m.node().value);
}

std::size_t term_size(const Invariant& m) {
  return std::visit(Overloaded{
                        [](const And& x) { return 1 + term_size(x.left) + term_size(x.right); },
                        [](const Or& x) { return 1 + term_size(x.left) + term_size(x.right); },
                        [](const Not& x) { return 1 + term_size(x.term); },
                        [](const Implies& x) {
                          return 1 + term_size(x.antecedent) + term_size(x.consequent);
                        },
                        [](const BigAnd& x) {
                          std::size_t n = 1;
                          for (const auto& t : x.terms) n += term_size(t);
                          return n;
                        },
                        [](const AtomValue&) -> std::size_t { return 1; },
                    },
                    m.node().value);
}

Invariant normalize(const Invariant& m) {
  return std::visit(
      Overloaded{
          [](const And& x) {
            Invariant l = normalize(x.left);
            Invariant r = normalize(x.right);
            if (is_false(l) || is_false(r)) return false_term();
            if (is_true(l)) return r;
            if (is_true(r)) return l;
            return make_and(std::move(l), std::move(r));
          },
          [](const Or& x) {
            Invariant l = normalize(x.left);
            Invariant r = normalize(x.right);
            if (is_true(l) || is_true(r)) return true_term();
            if (is_false(l)) return r;
            if (is_false(r)) return l;
            return make_or(std::move(l), std::move(r));
          },
          [](const Not& x) { return make_not(normalize(x.term)); },
          [](const Implies& x) {
            Invariant a = normalize(x.antecedent);
            Invariant c = normalize(x.consequent);
            if (is_true(a)) return c;
            return make_implies(std::move(a), std::move(c));
          },
          [](const BigAnd& x) {
            std::vector<Invariant> flat;
            flat.reserve(x.terms.size());
            for (const auto& t : x.terms) {
              Invariant n = normalize(t);
              if (const auto* inner = n.term_if<BigAnd>()) {
                flat.insert(flat.end(), inner->terms.begin(), inner->terms.end());
              } else {
                flat.push_back(std::move(n));
              }
            }
            return make_big_and(std::move(flat));
          },
          [&m](const AtomValue& a) {
            if (const auto* b = std::get_if<OccupyBox>(&a)) {
              if (b->x1 <= b->x2 && b->y1 <= b->y2) return m;
              return make_atom(OccupyBox{std::min(b->x1, b->x2), std::min(b->y1, b->y2),
                                         std::max(b->x1, b->x2), std::max(b->y1, b->y2)});
            }
            return m;
          },
      },
      m.node().value);
}

namespace {

// Replace every Owner atom by TRUE.
Invariant strip_owner_atoms(const Invariant& m) {
  return std::visit(
      Overloaded{
          [](const And& x) {
            return make_and(strip_owner_atoms(x.left), strip_owner_atoms(x.right));
          },
          [](const Or& x) { return make_or(strip_owner_atoms(x.left), strip_owner_atoms(x.right)); },
          [](const Not& x) { return make_not(strip_owner_atoms(x.term)); },
          [](const Implies& x) {
            return make_implies(strip_owner_atoms(x.antecedent), strip_owner_atoms(x.consequent));
          },
          [](const BigAnd& x) {
            std::vector<Invariant> ts;
            for (const auto& t : x.terms) ts.push_back(strip_owner_atoms(t));
            return make_big_and(std::move(ts));
          },
          [&m](const AtomValue& a) {
            return std::holds_alternative<Owner>(a) ? true_term() : m;
          },
      },
      m.node().value);
}

// Owner guards found among the top-level conjuncts of an antecedent; the last
// one read left to right is the innermost.
void collect_owner_guards(const Invariant& a, std::optional<std::string>& owner) {
  if (const auto* o = a.atom_if<Owner>()) {
    owner = o->name;
  } else if (const auto* c = a.term_if<And>()) {
    collect_owner_guards(c->left, owner);
    collect_owner_guards(c->right, owner);
  } else if (const auto* b = a.term_if<BigAnd>()) {
    for (const auto& t : b->terms) collect_owner_guards(t, owner);
  }
}

std::optional<Invariant> filter_rec(const Invariant& m, std::string_view target,
                                    const std::optional<std::string>& current) {
  const bool owned = current && *current == target;
  return std::visit(
      Overloaded{
          [&](const And& x) -> std::optional<Invariant> {
            auto l = filter_rec(x.left, target, current);
            auto r = filter_rec(x.right, target, current);
            if (l && r) return make_and(std::move(*l), std::move(*r));
            return l ? l : r;
          },
          [&](const Or& x) -> std::optional<Invariant> {
            auto l = filter_rec(x.left, target, current);
            auto r = filter_rec(x.right, target, current);
            if (l && r) return make_or(std::move(*l), std::move(*r));
            return l ? l : r;
          },
          [&](const Not& x) -> std::optional<Invariant> {
            auto t = filter_rec(x.term, target, current);
            if (!t) return std::nullopt;
            return make_not(std::move(*t));
          },
          [&](const Implies& x) -> std::optional<Invariant> {
            std::optional<std::string> guard;
            collect_owner_guards(x.antecedent, guard);
            if (!guard) {
              auto c = filter_rec(x.consequent, target, current);
              if (!c) return std::nullopt;
              return make_implies(x.antecedent, std::move(*c));
            }
            auto c = filter_rec(x.consequent, target, guard);
            if (!c) return std::nullopt;
            Invariant rest = normalize(strip_owner_atoms(x.antecedent));
            if (rest.atom_if<TrueAtom>()) return c;
            return make_implies(std::move(rest), std::move(*c));
          },
          [&](const BigAnd& x) -> std::optional<Invariant> {
            if (x.terms.empty()) {
              if (owned) return m;
              return std::nullopt;
            }
            std::vector<Invariant> kept;
            for (const auto& t : x.terms) {
              if (auto f = filter_rec(t, target, current)) kept.push_back(std::move(*f));
            }
            if (kept.empty()) return std::nullopt;
            if (kept.size() == 1 && x.terms.size() > 1) return kept.front();
            return make_big_and(std::move(kept));
          },
          [&](const AtomValue& a) -> std::optional<Invariant> {
            if (std::holds_alternative<Owner>(a) || !owned) return std::nullopt;
            return m;
          },
      },
      m.node().value);
}

}  // namespace

Invariant filter_by_owner(const Invariant& m, std::string_view owner) {
  auto r = filter_rec(m, owner, std::nullopt);
  return r ? normalize(*r) : true_term();
}

std::set<std::string> list_owners(const Invariant& m) {
  std::set<std::string> out;
  for_each_atom(m, [&](const AtomValue& a) {
    if (const auto* o = std::get_if<Owner>(&a)) out.insert(o->name);
  });
  return out;
}

}  // namespace stmc
