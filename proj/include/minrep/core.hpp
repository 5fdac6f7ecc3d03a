#ifndef MINREP_CORE_HPP
#define MINREP_CORE_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Core of the Template language: relations, repetition combinators,
// template expressions, and their evaluation to relation trees.
// Everything here is an immutable value; no parsing machinery.

namespace minrep {

using Symbol = std::string;

struct malformed_expr_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RelationKind { Internal, Termination };

// One instantiation of a (possibly polymorphic) hierarchical relation
// `x R x1 ... xn`. Several instantiations may share a name; the name is
// the identity that repeat detection compares.
struct Relation {
  std::string name;
  Symbol head;
  std::vector<Symbol> children;  // empty for termination relations
  RelationKind kind = RelationKind::Internal;
  Symbol terminal;  // termination relations only

  std::size_t arity() const { return children.size(); }
};

// A combinator slot: free variable, sibling repeat of an earlier free
// slot, or a single-step self copy of the head.
struct Slot {
  enum class Kind { Free, Ref, Star };
  Kind kind = Kind::Free;
  std::size_t ref = 0;  // valid when kind == Ref

  static Slot free() { return {Kind::Free, 0}; }
  static Slot ref_to(std::size_t j) { return {Kind::Ref, j}; }
  static Slot star() { return {Kind::Star, 0}; }

  bool operator==(const Slot&) const = default;
};

using Combinator = std::vector<Slot>;

// Ref slots must point at an earlier slot that is Free.
inline bool combinator_well_formed(const Combinator& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].kind == Slot::Kind::Ref) {
      if (m[i].ref >= i) return false;
      if (m[m[i].ref].kind != Slot::Kind::Free) return false;
    }
  }
  return true;
}

inline std::size_t free_slot_count(const Combinator& m) {
  std::size_t n = 0;
  for (const Slot& s : m)
    if (s.kind == Slot::Kind::Free) ++n;
  return n;
}

inline std::string combinator_to_string(const Combinator& m) {
  std::string out = "<";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ' ';
    switch (m[i].kind) {
      case Slot::Kind::Free: out += '_'; break;
      case Slot::Kind::Ref: out += std::to_string(m[i].ref); break;
      case Slot::Kind::Star: out += '*'; break;
    }
  }
  out += '>';
  return out;
}

// ---------------------------------------------------------------------------
// Template expressions

struct TemplateExpr;
using ExprPtr = std::shared_ptr<const TemplateExpr>;

struct TemplateExpr {
  enum class Kind { Id, Pure, Rep };
  Kind kind;
  std::string relation;           // Pure: relation name
  std::size_t relation_arity = 0; // Pure: arity of the named relation
  bool relation_terminates = false;
  ExprPtr head;                   // Rep
  Combinator comb;                // Rep
  std::vector<ExprPtr> children;  // Rep: free children, in slot order
};

inline ExprPtr id_expr() {
  auto e = std::make_shared<TemplateExpr>();
  e->kind = TemplateExpr::Kind::Id;
  return e;
}

inline ExprPtr pure_expr(const std::string& name, std::size_t arity,
                         bool terminates) {
  auto e = std::make_shared<TemplateExpr>();
  e->kind = TemplateExpr::Kind::Pure;
  e->relation = name;
  e->relation_arity = arity;
  e->relation_terminates = terminates;
  return e;
}

inline ExprPtr pure_expr(const Relation& r) {
  return pure_expr(r.name, r.arity(), r.kind == RelationKind::Termination);
}

inline ExprPtr rep_expr(ExprPtr head, Combinator comb,
                        std::vector<ExprPtr> children) {
  auto e = std::make_shared<TemplateExpr>();
  e->kind = TemplateExpr::Kind::Rep;
  e->head = std::move(head);
  e->comb = std::move(comb);
  e->children = std::move(children);
  return e;
}

inline std::size_t arity(const TemplateExpr& e);

// useRep applies the repetition combinator: one output expression per
// slot. Free slots consume the free children left to right, Ref slots
// copy the expression produced at the referenced slot, Star slots copy
// the head.
inline std::vector<ExprPtr> use_rep(const ExprPtr& head, const Combinator& m,
                                    const std::vector<ExprPtr>& free_children) {
  if (!combinator_well_formed(m))
    throw malformed_expr_error("combinator shape: ref to non-free or forward slot");
  if (free_children.size() != free_slot_count(m))
    throw malformed_expr_error("combinator arity: free child count mismatch");
  std::vector<ExprPtr> out;
  out.reserve(m.size());
  std::size_t next_free = 0;
  for (const Slot& s : m) {
    switch (s.kind) {
      case Slot::Kind::Free: out.push_back(free_children[next_free++]); break;
      case Slot::Kind::Ref: out.push_back(out[s.ref]); break;
      case Slot::Kind::Star: out.push_back(head); break;
    }
  }
  return out;
}

inline std::size_t arity(const TemplateExpr& e) {
  switch (e.kind) {
    case TemplateExpr::Kind::Id:
      return 1;
    case TemplateExpr::Kind::Pure:
      return e.relation_arity;
    case TemplateExpr::Kind::Rep: {
      if (!e.head) throw malformed_expr_error("Rep without head");
      if (e.comb.size() != arity(*e.head))
        throw malformed_expr_error("combinator arity: |m| != arity(head)");
      std::size_t total = 0;
      for (const ExprPtr& c : use_rep(e.head, e.comb, e.children))
        total += arity(*c);
      return total;
    }
  }
  throw malformed_expr_error("unreachable expr kind");
}

// |Id| = |Pure r| = 1; |Rep e m es| = |e| + 1 + sum |es_i|.
inline std::size_t size(const TemplateExpr& e) {
  switch (e.kind) {
    case TemplateExpr::Kind::Id:
    case TemplateExpr::Kind::Pure:
      return 1;
    case TemplateExpr::Kind::Rep: {
      if (!e.head) throw malformed_expr_error("Rep without head");
      std::size_t total = size(*e.head) + 1;
      for (const ExprPtr& c : e.children) total += size(*c);
      return total;
    }
  }
  throw malformed_expr_error("unreachable expr kind");
}

// ---------------------------------------------------------------------------
// Relation trees (computation flows)

struct CompTree;
using TreePtr = std::shared_ptr<const CompTree>;

// A tree of relation names whose leaves are termination relations or
// holes. Holes are the suspended part of the computation.
struct CompTree {
  bool is_hole = false;
  std::string relation;  // relation name, when not a hole
  bool terminates = false;
  std::vector<TreePtr> children;
};

inline TreePtr hole_tree() {
  auto t = std::make_shared<CompTree>();
  t->is_hole = true;
  return t;
}

inline TreePtr node_tree(const std::string& relation, bool terminates,
                         std::vector<TreePtr> children) {
  auto t = std::make_shared<CompTree>();
  t->relation = relation;
  t->terminates = terminates;
  t->children = std::move(children);
  return t;
}

inline std::size_t tree_arity(const CompTree& t) {
  if (t.is_hole) return 1;
  std::size_t n = 0;
  for (const TreePtr& c : t.children) n += tree_arity(*c);
  return n;
}

inline std::size_t tree_node_count(const CompTree& t) {
  if (t.is_hole) return 0;
  std::size_t n = 1;
  for (const TreePtr& c : t.children) n += tree_node_count(*c);
  return n;
}

inline bool tree_equal(const CompTree& a, const CompTree& b) {
  if (a.is_hole != b.is_hole) return false;
  if (a.is_hole) return true;
  if (a.relation != b.relation || a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!tree_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

// Plug `fills` into the holes of `t`, left to right in order.
inline TreePtr plug_holes(const TreePtr& t, const std::vector<TreePtr>& fills,
                          std::size_t& next) {
  if (t->is_hole) return fills.at(next++);
  if (t->children.empty()) return t;
  std::vector<TreePtr> kids;
  kids.reserve(t->children.size());
  for (const TreePtr& c : t->children) kids.push_back(plug_holes(c, fills, next));
  return node_tree(t->relation, t->terminates, std::move(kids));
}

// Evaluate a template expression to its computation flow.
// Pure r is the depth-1 tree with one hole per child slot; Rep plugs the
// evaluated useRep children into the head tree's holes left to right;
// Id is a single hole.
inline TreePtr evaluate(const ExprPtr& e) {
  switch (e->kind) {
    case TemplateExpr::Kind::Id:
      return hole_tree();
    case TemplateExpr::Kind::Pure: {
      std::vector<TreePtr> holes(e->relation_arity);
      for (auto& h : holes) h = hole_tree();
      return node_tree(e->relation, e->relation_terminates, std::move(holes));
    }
    case TemplateExpr::Kind::Rep: {
      TreePtr head = evaluate(e->head);
      if (e->comb.size() != tree_arity(*head))
        throw malformed_expr_error("combinator arity: |m| != arity(head)");
      std::vector<TreePtr> fills;
      for (const ExprPtr& c : use_rep(e->head, e->comb, e->children))
        fills.push_back(evaluate(c));
      std::size_t next = 0;
      TreePtr out = plug_holes(head, fills, next);
      return out;
    }
  }
  throw malformed_expr_error("unreachable expr kind");
}

// In-order surface yield: relation names of termination leaves, with a
// marker (nullopt) at each hole.
using YieldEntry = std::optional<std::string>;  // nullopt = hole marker

inline void yield_into(const CompTree& t, std::vector<YieldEntry>& out) {
  if (t.is_hole) {
    out.emplace_back(std::nullopt);
    return;
  }
  if (t.terminates) {
    out.emplace_back(t.relation);
    return;
  }
  for (const TreePtr& c : t.children) yield_into(*c, out);
}

inline std::vector<YieldEntry> yield(const CompTree& t) {
  std::vector<YieldEntry> out;
  yield_into(t, out);
  return out;
}

// ---------------------------------------------------------------------------
// Canonical embedding of a context-free derivation tree

struct DerivTree {
  Relation relation;
  std::vector<DerivTree> children;
};

// Every internal node becomes Rep(Pure r, <_.._>, children); leaves stay
// Pure. The result has size 2 * (#internal nodes) + (#leaves).
inline ExprPtr embed_derivation(const DerivTree& d) {
  if (d.relation.kind == RelationKind::Termination) {
    return pure_expr(d.relation);
  }
  Combinator m(d.relation.arity(), Slot::free());
  std::vector<ExprPtr> kids;
  kids.reserve(d.children.size());
  for (const DerivTree& c : d.children) kids.push_back(embed_derivation(c));
  return rep_expr(pure_expr(d.relation), std::move(m), std::move(kids));
}

// ---------------------------------------------------------------------------
// Printing and structural identity for expressions

inline std::string expr_to_string(const TemplateExpr& e) {
  switch (e.kind) {
    case TemplateExpr::Kind::Id:
      return "Id";
    case TemplateExpr::Kind::Pure:
      return "Pure " + e.relation;
    case TemplateExpr::Kind::Rep: {
      std::string out = "Rep(" + expr_to_string(*e.head) + ", " +
                        combinator_to_string(e.comb) + ", [";
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += ", ";
        out += expr_to_string(*e.children[i]);
      }
      out += "])";
      return out;
    }
  }
  return "?";
}

inline bool expr_equal(const TemplateExpr& a, const TemplateExpr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TemplateExpr::Kind::Id:
      return true;
    case TemplateExpr::Kind::Pure:
      return a.relation == b.relation;
    case TemplateExpr::Kind::Rep: {
      if (a.comb != b.comb || a.children.size() != b.children.size())
        return false;
      if (!expr_equal(*a.head, *b.head)) return false;
      for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!expr_equal(*a.children[i], *b.children[i])) return false;
      return true;
    }
  }
  return false;
}

}  // namespace minrep

#endif  // MINREP_CORE_HPP
