#ifndef MINREP_ANALYSIS_HPP
#define MINREP_ANALYSIS_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "minrep/core.hpp"
#include "minrep/engine.hpp"
#include "minrep/grammar.hpp"

// Queries over a closed chart: the template-program hypergraph, minimal
// sub-hypergraph extraction, enumeration of minimal templates, the size
// distribution, and the round-trip template checker.
//
// Items are projected onto (tree, region) before counting: a template
// program determines its computation flow but not the symbol
// instantiations, so typed items that differ only in their nonterminal
// assignment describe the same templates and must be counted once.

namespace minrep {

using BigCount = boost::multiprecision::cpp_int;

struct count_divergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct no_parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SizeDistribution {
  std::map<std::size_t, BigCount> counts;

  BigCount total() const {
    BigCount t = 0;
    for (const auto& [s, c] : counts) t += c;
    return t;
  }
  std::optional<std::size_t> min_size() const {
    if (counts.empty()) return std::nullopt;
    return counts.begin()->first;
  }
};

// ---------------------------------------------------------------------------
// Projection of the typed hypergraph onto template derivations

struct TemplateGraph {
  struct Node {
    TreeId tree = 0;
    IntervalType region;
    Weight weight = 0;
    std::vector<std::size_t> in_edges;  // edge indices, insertion order
    bool goal = false;
  };
  struct Edge {
    Hyperedge::Rule rule = Hyperedge::Rule::CompleteRep;
    std::size_t head = 0;
    std::size_t parent = 0;              // CompleteRep only
    std::vector<std::size_t> children;   // one per slot
    Combinator comb;
  };

  const Chart* chart = nullptr;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<std::size_t> goal_nodes;

  std::optional<Weight> goal_weight() const {
    std::optional<Weight> best;
    for (std::size_t g : goal_nodes)
      if (!best || nodes[g].weight < *best) best = nodes[g].weight;
    return best;
  }
};

// Works on partially explored charts too: only finalized items project,
// and every hyperedge among finalized items is sound on its own.
inline TemplateGraph project_chart(const Chart& chart) {
  TemplateGraph g;
  g.chart = &chart;
  std::unordered_map<std::string, std::size_t> node_ids;
  std::vector<std::size_t> item_to_node(chart.entries().size());

  auto node_key = [](const Item& item) {
    std::string key = std::to_string(item.tree) + "@" +
                      std::to_string(item.region.span.lo) + ":" +
                      std::to_string(item.region.span.hi);
    for (const Interval& h : item.region.holes)
      key += "," + std::to_string(h.lo) + ":" + std::to_string(h.hi);
    return key;
  };

  for (std::size_t i = 0; i < chart.entries().size(); ++i) {
    const auto& e = chart.entries()[i];
    if (!e.finalized) continue;
    std::string key = node_key(e.item);
    auto it = node_ids.find(key);
    if (it == node_ids.end()) {
      std::size_t id = g.nodes.size();
      TemplateGraph::Node n;
      n.tree = e.item.tree;
      n.region = e.item.region;
      n.weight = e.weight;
      n.goal = chart.is_goal(e.item);
      g.nodes.push_back(std::move(n));
      node_ids.emplace(std::move(key), id);
      item_to_node[i] = id;
    } else {
      TemplateGraph::Node& n = g.nodes[it->second];
      n.weight = std::min(n.weight, e.weight);
      n.goal = n.goal || chart.is_goal(e.item);
      item_to_node[i] = it->second;
    }
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].goal) g.goal_nodes.push_back(i);

  std::set<std::string> seen;
  for (const Hyperedge& he : chart.edges()) {
    if (!chart.entries()[he.head].finalized) continue;
    TemplateGraph::Edge pe;
    pe.rule = he.rule;
    pe.head = item_to_node[he.head];
    std::string key = std::to_string(static_cast<int>(he.rule)) + "#" +
                      std::to_string(pe.head);
    if (he.rule == Hyperedge::Rule::CompleteRep) {
      bool all_final = chart.entries()[he.parent].finalized;
      for (std::uint32_t c : he.children)
        all_final = all_final && chart.entries()[c].finalized;
      if (!all_final) continue;
      pe.parent = item_to_node[he.parent];
      pe.comb = he.comb;
      key += "<" + std::to_string(pe.parent);
      for (std::uint32_t c : he.children) {
        pe.children.push_back(item_to_node[c]);
        key += "," + std::to_string(pe.children.back());
      }
      key += combinator_to_string(pe.comb);
    }
    if (!seen.insert(key).second) continue;
    std::size_t idx = g.edges.size();
    g.edges.push_back(std::move(pe));
    g.nodes[g.edges[idx].head].in_edges.push_back(idx);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Minimal sub-hypergraph

struct MinimalSubgraph {
  TemplateGraph graph;
  std::vector<bool> edge_minimal;      // per edge of `graph`
  std::vector<std::size_t> minimal_goals;
  Weight goal_weight = 0;
};

inline Weight edge_weight(const TemplateGraph& g, const TemplateGraph::Edge& e) {
  if (e.rule != Hyperedge::Rule::CompleteRep) return 1;
  std::vector<Weight> child_weights;
  child_weights.reserve(e.children.size());
  for (std::size_t c : e.children) child_weights.push_back(g.nodes[c].weight);
  return merge_weight(e.comb, g.nodes[e.parent].weight, child_weights);
}

// Backward traversal from the minimal goal items, keeping exactly the
// hyperedges whose combined weight meets the item weight.
inline MinimalSubgraph extract_minimal(const Chart& chart) {
  MinimalSubgraph sub;
  sub.graph = project_chart(chart);
  const TemplateGraph& g = sub.graph;
  auto best = g.goal_weight();
  if (!best) throw no_parse_error("no goal item: sequence is not derivable");
  sub.goal_weight = *best;
  for (std::size_t n : sub.graph.goal_nodes)
    if (g.nodes[n].weight == *best) sub.minimal_goals.push_back(n);

  sub.edge_minimal.assign(g.edges.size(), false);
  std::vector<bool> visited(g.nodes.size(), false);
  std::vector<std::size_t> stack = sub.minimal_goals;
  while (!stack.empty()) {
    std::size_t n = stack.back();
    stack.pop_back();
    if (visited[n]) continue;
    visited[n] = true;
    for (std::size_t ei : g.nodes[n].in_edges) {
      const TemplateGraph::Edge& e = g.edges[ei];
      if (edge_weight(g, e) != g.nodes[n].weight) continue;
      sub.edge_minimal[ei] = true;
      if (e.rule == Hyperedge::Rule::CompleteRep) {
        stack.push_back(e.parent);
        for (std::size_t i = 0; i < e.children.size(); ++i)
          if (e.comb[i].kind == Slot::Kind::Free) stack.push_back(e.children[i]);
      }
    }
  }
  return sub;
}

namespace detail {

inline ExprPtr pure_from_tree(const TreeInterner& trees, TreeId t) {
  const auto& node = trees[t];
  return pure_expr(node.relation, node.children.size(), node.terminates);
}

inline void enumerate_node(const MinimalSubgraph& sub, std::size_t node,
                           std::size_t limit,
                           std::map<std::size_t, std::vector<ExprPtr>>& memo,
                           std::vector<ExprPtr>& out) {
  auto it = memo.find(node);
  if (it != memo.end()) {
    out = it->second;
    return;
  }
  const TemplateGraph& g = sub.graph;
  const TreeInterner& trees = g.chart->trees();
  std::vector<ExprPtr> result;
  for (std::size_t ei : g.nodes[node].in_edges) {
    if (!sub.edge_minimal[ei]) continue;
    if (result.size() >= limit) break;
    const TemplateGraph::Edge& e = g.edges[ei];
    if (e.rule != Hyperedge::Rule::CompleteRep) {
      result.push_back(pure_from_tree(trees, g.nodes[node].tree));
      continue;
    }
    std::vector<ExprPtr> heads;
    enumerate_node(sub, e.parent, limit, memo, heads);
    std::vector<std::size_t> free_slots;
    for (std::size_t i = 0; i < e.comb.size(); ++i)
      if (e.comb[i].kind == Slot::Kind::Free) free_slots.push_back(i);
    std::vector<std::vector<ExprPtr>> free_lists(free_slots.size());
    bool empty_component = false;
    for (std::size_t k = 0; k < free_slots.size(); ++k) {
      enumerate_node(sub, e.children[free_slots[k]], limit, memo, free_lists[k]);
      empty_component = empty_component || free_lists[k].empty();
    }
    if (empty_component) continue;
    // nested product in deterministic order
    std::vector<std::size_t> idx(free_slots.size(), 0);
    for (const ExprPtr& h : heads) {
      std::fill(idx.begin(), idx.end(), 0);
      bool more = true;
      while (more && result.size() < limit) {
        std::vector<ExprPtr> frees;
        frees.reserve(free_slots.size());
        for (std::size_t k = 0; k < free_slots.size(); ++k)
          frees.push_back(free_lists[k][idx[k]]);
        result.push_back(rep_expr(h, e.comb, std::move(frees)));
        more = false;
        for (std::size_t k = free_slots.size(); k-- > 0;) {
          if (++idx[k] < free_lists[k].size()) {
            more = true;
            break;
          }
          idx[k] = 0;
        }
      }
      if (result.size() >= limit) break;
    }
  }
  if (result.size() > limit) result.resize(limit);
  memo.emplace(node, result);
  out = std::move(result);
}

}  // namespace detail

// Materialize up to `limit` distinct minimal template programs, in a
// deterministic order (edge insertion order at every node).
inline std::vector<ExprPtr> enumerate_minimal(const MinimalSubgraph& sub,
                                              std::size_t limit) {
  std::vector<ExprPtr> out;
  if (limit == 0) return out;
  std::map<std::size_t, std::vector<ExprPtr>> memo;
  for (std::size_t goal : sub.minimal_goals) {
    std::vector<ExprPtr> part;
    detail::enumerate_node(sub, goal, limit - out.size(), memo, part);
    for (ExprPtr& e : part) {
      out.push_back(std::move(e));
      if (out.size() >= limit) return out;
    }
    memo.clear();  // limits differ between goals; recompute
  }
  return out;
}

// ---------------------------------------------------------------------------
// Size distribution

namespace detail {

using Poly = std::map<std::size_t, BigCount>;  // size -> count

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [sa, ca] : a)
    for (const auto& [sb, cb] : b) out[sa + sb] += ca * cb;
  return out;
}

struct DistState {
  const TemplateGraph* graph;
  std::vector<Poly> memo;
  std::vector<int> mark;  // 0 unvisited, 1 in progress, 2 done
};

inline const Poly& node_poly(DistState& st, std::size_t node) {
  if (st.mark[node] == 2) return st.memo[node];
  if (st.mark[node] == 1)
    throw count_divergence_error(
        "diverging template count: item derives itself (tree " +
        st.graph->chart->trees().to_string(st.graph->nodes[node].tree) + ")");
  st.mark[node] = 1;
  const TemplateGraph& g = *st.graph;
  Poly p;
  for (std::size_t ei : g.nodes[node].in_edges) {
    const TemplateGraph::Edge& e = g.edges[ei];
    if (e.rule != Hyperedge::Rule::CompleteRep) {
      p[1] += 1;
      continue;
    }
    Poly acc = node_poly(st, e.parent);
    for (std::size_t i = 0; i < e.children.size(); ++i)
      if (e.comb[i].kind == Slot::Kind::Free)
        acc = poly_mul(acc, node_poly(st, e.children[i]));
    for (const auto& [s, c] : acc) p[s + 1] += c;  // +1 for the combinator
  }
  st.memo[node] = std::move(p);
  st.mark[node] = 2;
  return st.memo[node];
}

}  // namespace detail

// The exact census of all template programs deriving the goal, bucketed
// by size. Requires a chart closed under full combinator enumeration.
inline SizeDistribution size_distribution(const Chart& chart) {
  if (!chart.closed())
    throw std::logic_error("size_distribution requires a chart run to closure");
  TemplateGraph g = project_chart(chart);
  detail::DistState st{&g, std::vector<detail::Poly>(g.nodes.size()),
                       std::vector<int>(g.nodes.size(), 0)};
  SizeDistribution dist;
  for (std::size_t goal : g.goal_nodes)
    for (const auto& [s, c] : detail::node_poly(st, goal)) dist.counts[s] += c;
  return dist;
}

// ---------------------------------------------------------------------------
// Round-trip template checking

struct CheckResult {
  bool ok = false;
  std::string reason;  // first failed check when !ok

  static CheckResult accept() { return {true, ""}; }
  static CheckResult reject(std::string why) { return {false, std::move(why)}; }
};

namespace detail {

// Possible head symbols of an instantiated tree whose leaf tokens are
// pinned to the sequence, computed bottom-up.
inline std::set<Symbol> possible_heads(const GrammarIndex& gx,
                                       const CompTree& t,
                                       const std::vector<Symbol>& seq,
                                       std::size_t& pos) {
  std::set<Symbol> heads;
  const auto* insts = gx.instances(t.relation);
  if (!insts) return heads;
  if (t.terminates) {
    if (pos >= seq.size()) return heads;
    const Symbol& tok = seq[pos++];
    for (const Relation* r : *insts)
      if (r->kind == RelationKind::Termination && r->terminal == tok)
        heads.insert(r->head);
    return heads;
  }
  std::vector<std::set<Symbol>> kid_heads;
  kid_heads.reserve(t.children.size());
  for (const TreePtr& c : t.children)
    kid_heads.push_back(possible_heads(gx, *c, seq, pos));
  for (const Relation* r : *insts) {
    if (r->kind != RelationKind::Internal || r->arity() != t.children.size())
      continue;
    bool fits = true;
    for (std::size_t i = 0; i < r->children.size() && fits; ++i)
      fits = kid_heads[i].count(r->children[i]) > 0;
    if (fits) heads.insert(r->head);
  }
  return heads;
}

inline std::optional<std::string> structural_problem(const GrammarIndex& gx,
                                                     const TemplateExpr& e) {
  switch (e.kind) {
    case TemplateExpr::Kind::Id:
      return std::nullopt;
    case TemplateExpr::Kind::Pure: {
      const RelationSignature* sig = gx.signature(e.relation);
      if (!sig) return "unknown relation '" + e.relation + "'";
      if (sig->arity != e.relation_arity ||
          (sig->kind == RelationKind::Termination) != e.relation_terminates)
        return "relation '" + e.relation + "' used with wrong signature";
      return std::nullopt;
    }
    case TemplateExpr::Kind::Rep: {
      if (!e.head) return std::string("Rep without head");
      if (!combinator_well_formed(e.comb))
        return std::string("combinator shape: ref to non-free or forward slot");
      if (e.children.size() != free_slot_count(e.comb))
        return std::string("combinator arity: free child count mismatch");
      if (auto p = structural_problem(gx, *e.head)) return p;
      for (const ExprPtr& c : e.children)
        if (auto p = structural_problem(gx, *c)) return p;
      return std::nullopt;
    }
  }
  return std::string("malformed expression");
}

}  // namespace detail

// Accepts iff `e` is well-formed, closed (arity 0), evaluates to a
// relation tree instantiable over `g` with the start symbol at the root,
// and yields exactly `seq`.
inline CheckResult check_template(const Grammar& g, const ExprPtr& e,
                                  const std::vector<Symbol>& seq) {
  GrammarIndex gx(g);
  if (auto p = detail::structural_problem(gx, *e)) return CheckResult::reject(*p);
  std::size_t a;
  try {
    a = arity(*e);
  } catch (const malformed_expr_error& err) {
    return CheckResult::reject(err.what());
  }
  if (a != 0)
    return CheckResult::reject("nonzero arity: template leaves " +
                               std::to_string(a) + " hole(s) unfilled");
  TreePtr t = evaluate(e);
  auto ys = yield(*t);
  if (ys.size() != seq.size())
    return CheckResult::reject("yield mismatch: template yields " +
                               std::to_string(ys.size()) + " token(s), expected " +
                               std::to_string(seq.size()));
  std::size_t pos = 0;
  std::set<Symbol> heads = detail::possible_heads(gx, *t, seq, pos);
  if (heads.empty())
    return CheckResult::reject("yield mismatch: no relational instantiation "
                               "produces this sequence");
  if (heads.count(g.start) == 0)
    return CheckResult::reject("start-symbol mismatch: derivable heads do not "
                               "include '" + g.start + "'");
  return CheckResult::accept();
}

}  // namespace minrep

#endif  // MINREP_ANALYSIS_HPP
