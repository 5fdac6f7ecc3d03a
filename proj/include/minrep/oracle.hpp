#ifndef MINREP_ORACLE_HPP
#define MINREP_ORACLE_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "minrep/analysis.hpp"
#include "minrep/core.hpp"
#include "minrep/grammar.hpp"

// Brute-force enumeration of template programs for small instances. This
// is the ground truth the engine is checked against; it shares nothing
// with the deduction system except the language definition itself.

namespace minrep {

struct oracle_bound_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace oracle_detail {

struct Candidate {
  ExprPtr expr;
  TreePtr tree;          // evaluated computation flow
  std::size_t arity = 0; // hole count of `tree`
  std::size_t leaves = 0;
};

inline void tree_key_into(const CompTree& t, std::string& out) {
  if (t.is_hole) {
    out += '_';
    return;
  }
  out += t.relation;
  out += t.terminates ? '!' : '(';
  for (const TreePtr& c : t.children) tree_key_into(*c, out);
  out += ')';
}

struct HeadSet {
  bool any = false;  // hole: every symbol fits
  std::set<Symbol> symbols;
  bool contains(const Symbol& s) const { return any || symbols.count(s) > 0; }
  bool empty() const { return !any && symbols.empty(); }
};

inline HeadSet free_heads(const GrammarIndex& gx, const CompTree& t) {
  if (t.is_hole) return {true, {}};
  HeadSet out;
  const auto* insts = gx.instances(t.relation);
  if (!insts) return out;
  if (t.terminates) {
    for (const Relation* r : *insts)
      if (r->kind == RelationKind::Termination) out.symbols.insert(r->head);
    return out;
  }
  std::vector<HeadSet> kids;
  kids.reserve(t.children.size());
  for (const TreePtr& c : t.children) kids.push_back(free_heads(gx, *c));
  for (const Relation* r : *insts) {
    if (r->kind != RelationKind::Internal || r->arity() != t.children.size())
      continue;
    bool fits = true;
    for (std::size_t i = 0; i < r->children.size() && fits; ++i)
      fits = kids[i].contains(r->children[i]);
    if (fits) out.symbols.insert(r->head);
  }
  return out;
}

inline std::size_t leaf_count(const CompTree& t) {
  if (t.is_hole) return 0;
  if (t.terminates) return 1;
  std::size_t n = 0;
  for (const TreePtr& c : t.children) n += leaf_count(*c);
  return n;
}

// All combinator slot lists over `k` slots. At the expression level a
// Star slot always repeats the head and a Ref slot always repeats an
// earlier free slot, so every shape is admissible.
inline void combinators_rec(std::size_t k, Combinator& cur,
                            std::vector<Combinator>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  const std::size_t i = cur.size();
  cur.push_back(Slot::free());
  combinators_rec(k, cur, out);
  cur.pop_back();
  for (std::size_t j = 0; j < i; ++j) {
    if (cur[j].kind != Slot::Kind::Free) continue;
    cur.push_back(Slot::ref_to(j));
    combinators_rec(k, cur, out);
    cur.pop_back();
  }
  cur.push_back(Slot::star());
  combinators_rec(k, cur, out);
  cur.pop_back();
}

inline std::vector<Combinator> all_combinators(std::size_t k) {
  std::vector<Combinator> out;
  Combinator cur;
  combinators_rec(k, cur, out);
  return out;
}

}  // namespace oracle_detail

struct OracleConfig {
  std::size_t max_seq_len = 6;
};

// Every well-formed closed template of size <= max_size whose evaluation
// derives `seq` from the start symbol, each exactly once.
inline std::vector<ExprPtr> oracle_enumerate(const Grammar& g,
                                             const std::vector<Symbol>& seq,
                                             std::size_t max_size,
                                             OracleConfig cfg = {}) {
  using namespace oracle_detail;
  if (seq.size() > cfg.max_seq_len)
    throw oracle_bound_error("oracle refuses sequences longer than " +
                             std::to_string(cfg.max_seq_len) + " tokens");
  if (max_size < 1) throw oracle_bound_error("oracle requires max_size >= 1");
  GrammarIndex gx(g);
  const std::size_t n = seq.size();

  // instantiability is a property of the tree shape alone; candidates
  // share shapes heavily, so the check is memoized
  std::map<std::string, bool> instantiable;
  auto tree_ok = [&](const TreePtr& t) {
    std::string key;
    tree_key_into(*t, key);
    auto it = instantiable.find(key);
    if (it != instantiable.end()) return it->second;
    bool ok = !free_heads(gx, *t).empty();
    instantiable.emplace(std::move(key), ok);
    return ok;
  };

  // pool[s] = all candidates of size s that could still occur inside an
  // accepted template: instantiable, and leaves plus holes within budget
  std::vector<std::vector<Candidate>> pool(max_size + 1);

  for (const auto& [name, sig] : gx.signatures) {
    Candidate c;
    c.expr = pure_expr(name, sig.arity, sig.kind == RelationKind::Termination);
    c.tree = evaluate(c.expr);
    c.arity = sig.arity;
    c.leaves = sig.kind == RelationKind::Termination ? 1 : 0;
    if (c.leaves + c.arity <= n && tree_ok(c.tree)) pool[1].push_back(std::move(c));
  }

  for (std::size_t s = 2; s <= max_size; ++s) {
    for (std::size_t a = 1; a + 1 <= s; ++a) {
      for (const Candidate& head : pool[a]) {
        if (head.arity == 0) continue;  // a Rep must compose something
        for (const Combinator& m : all_combinators(head.arity)) {
          const std::size_t f = free_slot_count(m);
          const std::size_t budget = s - 1 - a;
          if (f == 0 && budget != 0) continue;
          if (f > budget) continue;  // every free child has size >= 1
          // arity and leaf counts of the merged tree follow from the
          // slot assignment alone, so hopeless combinations are skipped
          // before any tree is built
          std::size_t base_leaves = head.leaves, base_arity = 0;
          for (const Slot& slot : m)
            if (slot.kind == Slot::Kind::Star) {
              base_leaves += head.leaves;
              base_arity += head.arity;
            }
          // distribute `budget` over f children
          std::vector<const Candidate*> chosen(f);
          auto assign = [&](auto&& self, std::size_t k, std::size_t left,
                            std::size_t leaves, std::size_t arity) -> void {
            if (leaves + arity > n) return;
            if (k == f) {
              if (left != 0) return;
              Candidate c;
              c.arity = arity;
              c.leaves = leaves;
              std::vector<TreePtr> fills;
              fills.reserve(m.size());
              std::size_t next_free = 0;
              for (const Slot& slot : m) {
                switch (slot.kind) {
                  case Slot::Kind::Free:
                    fills.push_back(chosen[next_free++]->tree);
                    break;
                  case Slot::Kind::Ref: {
                    std::size_t j = 0, free_at = 0;
                    for (; free_at < slot.ref; ++free_at)
                      if (m[free_at].kind == Slot::Kind::Free) ++j;
                    fills.push_back(chosen[j]->tree);
                    break;
                  }
                  case Slot::Kind::Star:
                    fills.push_back(head.tree);
                    break;
                }
              }
              std::size_t next = 0;
              c.tree = plug_holes(head.tree, fills, next);
              if (!tree_ok(c.tree)) return;
              std::vector<ExprPtr> kids;
              kids.reserve(f);
              for (const Candidate* cc : chosen) kids.push_back(cc->expr);
              c.expr = rep_expr(head.expr, m, std::move(kids));
              pool[s].push_back(std::move(c));
              return;
            }
            const std::size_t remaining_mins = f - k - 1;
            // count how often free slot k is used (once, plus its refs)
            std::size_t uses = 1;
            {
              std::size_t idx = 0, seen = 0;
              for (; idx < m.size(); ++idx) {
                if (m[idx].kind == Slot::Kind::Free) {
                  if (seen == k) break;
                  ++seen;
                }
              }
              for (const Slot& slot : m)
                if (slot.kind == Slot::Kind::Ref && slot.ref == idx) ++uses;
            }
            for (std::size_t cs = 1; cs + remaining_mins <= left; ++cs)
              for (const Candidate& c : pool[cs]) {
                chosen[k] = &c;
                self(self, k + 1, left - cs, leaves + uses * c.leaves,
                     arity + uses * c.arity);
              }
          };
          assign(assign, 0, budget, base_leaves, base_arity);
        }
      }
    }
  }

  std::vector<ExprPtr> accepted;
  for (std::size_t s = 1; s <= max_size; ++s)
    for (const Candidate& c : pool[s]) {
      if (c.arity != 0 || c.leaves != n) continue;
      std::size_t pos = 0;
      std::set<Symbol> heads = detail::possible_heads(gx, *c.tree, seq, pos);
      if (heads.count(g.start)) accepted.push_back(c.expr);
    }
  return accepted;
}

inline std::optional<std::size_t> oracle_min_size(
    const Grammar& g, const std::vector<Symbol>& seq, std::size_t max_size,
    OracleConfig cfg = {}) {
  std::optional<std::size_t> best;
  for (const ExprPtr& e : oracle_enumerate(g, seq, max_size, cfg)) {
    std::size_t s = size(*e);
    if (!best || s < *best) best = s;
  }
  return best;
}

// Exhaustive census by size, directly comparable with size_distribution
// on buckets <= max_size.
inline SizeDistribution oracle_census(const Grammar& g,
                                      const std::vector<Symbol>& seq,
                                      std::size_t max_size,
                                      OracleConfig cfg = {}) {
  SizeDistribution dist;
  for (const ExprPtr& e : oracle_enumerate(g, seq, max_size, cfg))
    dist.counts[size(*e)] += 1;
  return dist;
}

}  // namespace minrep

#endif  // MINREP_ORACLE_HPP
