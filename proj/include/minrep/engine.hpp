#ifndef MINREP_ENGINE_HPP
#define MINREP_ENGINE_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "minrep/core.hpp"
#include "minrep/grammar.hpp"
#include "minrep/hashcons.hpp"

// The weighted deduction system: chart, agenda, Scan-Rel / Prim-Rel
// axioms, the Complete-Rep inference rule, min-size weights, and the
// derivation hypergraph. Weights are combined per proof (the free slots
// of the combinator decide which child sizes count), aggregated by min.

namespace minrep {

struct bounded_search_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Interval {
  int lo = 0;  // inclusive
  int hi = 0;  // exclusive
  bool operator==(const Interval&) const = default;
  int length() const { return hi - lo; }
};

// Overall span plus the ordered spans of the holes: "if the holes' spans
// are explained, this computation explains the span".
struct IntervalType {
  Interval span;
  std::vector<Interval> holes;
  bool operator==(const IntervalType&) const = default;
};

// Nonterminal signature x1 -> ... -> xn -> x of a computation flow.
struct CompType {
  std::vector<Symbol> args;
  Symbol head;
  bool operator==(const CompType&) const = default;
};

struct Item {
  CompType type;
  TreeId tree = 0;
  IntervalType region;
  bool operator==(const Item&) const = default;
};

using Weight = std::size_t;  // minimal template size

// wParent + 1 for the combinator + the sizes of the free children only.
inline Weight merge_weight(const Combinator& m, Weight parent,
                           const std::vector<Weight>& children) {
  Weight w = parent + 1;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i].kind == Slot::Kind::Free) w += children[i];
  return w;
}

struct Hyperedge {
  enum class Rule { ScanRel, PrimRel, CompleteRep };
  Rule rule = Rule::CompleteRep;
  std::uint32_t head = 0;
  std::int32_t parent = -1;            // CompleteRep only
  std::vector<std::uint32_t> children; // one per combinator slot
  Combinator comb;
  const Relation* relation = nullptr;  // axioms: the instantiation used
};

struct EngineConfig {
  std::size_t max_holes = 3;
  std::size_t max_tree_nodes = 0;  // 0 means 2 * |seq|
  std::size_t max_items = 2000000;
  bool all_free_only = false;      // restrict to trivial-repeat combinators
};

// The fallible merge of Complete-Rep: parent computation plus one child
// item per hole. Returns the merged item, or nothing when the repeat
// conditions, type compatibility, or region compatibility fail.
inline std::optional<Item> complete_rep(const Item& parent,
                                        const std::vector<Item>& children,
                                        const Combinator& m,
                                        TreeInterner& trees) {
  const std::size_t n = parent.region.holes.size();
  if (m.size() != n || children.size() != n) return std::nullopt;
  if (!combinator_well_formed(m)) return std::nullopt;
  if (parent.type.args.size() != n || trees.arity(parent.tree) != n)
    return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) {
    // hasRep
    if (m[i].kind == Slot::Kind::Ref &&
        children[i].tree != children[m[i].ref].tree)
      return std::nullopt;
    if (m[i].kind == Slot::Kind::Star && children[i].tree != parent.tree)
      return std::nullopt;
    // mergeType
    if (children[i].type.head != parent.type.args[i]) return std::nullopt;
    // mergeR
    if (!(children[i].region.span == parent.region.holes[i]))
      return std::nullopt;
  }
  Item out;
  out.type.head = parent.type.head;
  out.region.span = parent.region.span;
  std::vector<TreeId> fills;
  fills.reserve(n);
  for (const Item& c : children) {
    out.type.args.insert(out.type.args.end(), c.type.args.begin(),
                         c.type.args.end());
    out.region.holes.insert(out.region.holes.end(), c.region.holes.begin(),
                            c.region.holes.end());
    fills.push_back(c.tree);
  }
  out.tree = trees.plug(parent.tree, fills);
  return out;
}

// Scan-Rel: one item per position and matching termination instantiation.
inline std::vector<std::pair<Item, Weight>> scan_axioms(
    const GrammarIndex& gx, const std::vector<Symbol>& seq,
    TreeInterner& trees) {
  std::vector<std::pair<Item, Weight>> out;
  for (int i = 0; i < static_cast<int>(seq.size()); ++i) {
    auto it = gx.terminations_by_terminal.find(seq[i]);
    if (it == gx.terminations_by_terminal.end()) continue;
    for (const Relation* r : it->second) {
      Item item;
      item.type.head = r->head;
      item.tree = trees.make(r->name, true, {});
      item.region.span = {i, i + 1};
      out.emplace_back(std::move(item), 1);
    }
  }
  return out;
}

// Prim-Rel: every internal instantiation over every split of an interval
// into contiguous nonempty hole spans.
inline std::vector<std::pair<Item, Weight>> prim_axioms(const GrammarIndex& gx,
                                                        int n,
                                                        TreeInterner& trees) {
  std::vector<std::pair<Item, Weight>> out;
  for (const Relation& r : gx.grammar->relations) {
    if (r.kind != RelationKind::Internal) continue;
    const std::size_t k = r.arity();
    TreeId tree = trees.make(
        r.name, false, std::vector<TreeId>(k, TreeInterner::kHole));
    for (int lo = 0; lo < n; ++lo) {
      for (int hi = lo + 1; hi <= n; ++hi) {
        auto emit = [&](std::vector<Interval> holes) {
          Item item;
          item.type.args = r.children;
          item.type.head = r.head;
          item.tree = tree;
          item.region.span = {lo, hi};
          item.region.holes = std::move(holes);
          out.emplace_back(std::move(item), 1);
        };
        if (k == 1) {
          emit({{lo, hi}});
        } else if (k == 2) {
          for (int mid = lo + 1; mid < hi; ++mid)
            emit({{lo, mid}, {mid, hi}});
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

class Chart {
 public:
  struct Entry {
    Item item;
    Weight weight = 0;
    bool finalized = false;
  };

  Chart(const Grammar& g, std::vector<Symbol> seq, EngineConfig cfg)
      : grammar_(&g), index_(g), seq_(std::move(seq)), cfg_(cfg) {
    if (cfg_.max_tree_nodes == 0) cfg_.max_tree_nodes = 2 * seq_.size();
  }
  // the chart keeps a pointer to the grammar; a temporary would dangle
  Chart(Grammar&&, std::vector<Symbol>, EngineConfig) = delete;

  const Grammar& grammar() const { return *grammar_; }
  const std::vector<Symbol>& sequence() const { return seq_; }
  const EngineConfig& config() const { return cfg_; }
  TreeInterner& trees() { return trees_; }
  const TreeInterner& trees() const { return trees_; }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<Hyperedge>& edges() const { return edges_; }
  const std::vector<Weight>& pop_weights() const { return pop_weights_; }
  bool closed() const { return closed_; }

  bool is_goal(const Item& item) const {
    return item.type.args.empty() && item.type.head == grammar_->start &&
           item.region.holes.empty() && item.region.span.lo == 0 &&
           item.region.span.hi == static_cast<int>(seq_.size());
  }

  std::vector<std::uint32_t> goal_ids() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].finalized && is_goal(entries_[i].item)) out.push_back(i);
    return out;
  }

  std::optional<Weight> goal_weight() const {
    std::optional<Weight> best;
    for (std::uint32_t id : goal_ids()) {
      Weight w = entries_[id].weight;
      if (!best || w < *best) best = w;
    }
    return best;
  }

  // Run the deduction to closure (stop_at_goal = false), or pop
  // best-first and stop as soon as a goal item is finalized.
  void run(bool stop_at_goal) {
    seed();
    while (!agenda_.empty()) {
      auto [w, id] = agenda_.top();
      agenda_.pop();
      Entry& e = entries_[id];
      if (e.finalized) continue;  // stale agenda entry
      if (w != e.weight) continue;
      e.finalized = true;
      pop_weights_.push_back(w);
      index_finalized(id);
      if (stop_at_goal && is_goal(e.item)) return;
      combine(id);
    }
    if (!stop_at_goal) closed_ = true;
  }

 private:
  using AgendaEntry = std::pair<Weight, std::uint32_t>;

  void seed() {
    for (auto& [item, w] : scan_axioms(index_, seq_, trees_)) {
      std::uint32_t id = upsert(item, w);
      if (!edge_keys_.insert("S" + std::to_string(id)).second) continue;
      Hyperedge e;
      e.rule = Hyperedge::Rule::ScanRel;
      e.head = id;
      e.relation = find_axiom_relation(item, true);
      add_edge(std::move(e));
    }
    for (auto& [item, w] :
         prim_axioms(index_, static_cast<int>(seq_.size()), trees_)) {
      if (item.region.holes.size() > cfg_.max_holes) continue;
      std::uint32_t id = upsert(item, w);
      if (!edge_keys_.insert("P" + std::to_string(id)).second) continue;
      Hyperedge e;
      e.rule = Hyperedge::Rule::PrimRel;
      e.head = id;
      e.relation = find_axiom_relation(item, false);
      add_edge(std::move(e));
    }
  }

  const Relation* find_axiom_relation(const Item& item, bool termination) const {
    const auto* insts = index_.instances(trees_[item.tree].relation);
    if (!insts) return nullptr;
    for (const Relation* r : *insts) {
      if (termination) {
        if (r->head == item.type.head) return r;
      } else {
        if (r->head == item.type.head && r->children == item.type.args)
          return r;
      }
    }
    return nullptr;
  }

  std::string item_key(const Item& item) const {
    std::string key = std::to_string(item.tree);
    key += '|';
    key += item.type.head;
    for (const Symbol& a : item.type.args) {
      key += ';';
      key += a;
    }
    key += '|';
    key += std::to_string(item.region.span.lo);
    key += ':';
    key += std::to_string(item.region.span.hi);
    for (const Interval& h : item.region.holes) {
      key += ',';
      key += std::to_string(h.lo);
      key += ':';
      key += std::to_string(h.hi);
    }
    return key;
  }

  std::uint32_t upsert(const Item& item, Weight w) {
    std::string key = item_key(item);
    auto it = ids_.find(key);
    if (it == ids_.end()) {
      if (entries_.size() >= cfg_.max_items)
        throw bounded_search_error("bounded search: max_items (" +
                                   std::to_string(cfg_.max_items) +
                                   ") exceeded");
      std::uint32_t id = static_cast<std::uint32_t>(entries_.size());
      entries_.push_back({item, w, false});
      ids_.emplace(std::move(key), id);
      agenda_.push({w, id});
      return id;
    }
    Entry& e = entries_[it->second];
    if (w < e.weight) {
      // final weights are reached in pop order; a decrease after
      // finalization would violate the Knuth property
      if (e.finalized)
        throw std::logic_error("weight decreased after finalization");
      e.weight = w;
      agenda_.push({w, it->second});
    }
    return it->second;
  }

  void index_finalized(std::uint32_t id) {
    const Item& item = entries_[id].item;
    by_span_head_[span_head_key(item.region.span, item.type.head)].push_back(id);
    for (std::size_t i = 0; i < item.region.holes.size(); ++i)
      parents_by_hole_[span_head_key(item.region.holes[i], item.type.args[i])]
          .push_back({id, i});
  }

  static std::string span_head_key(const Interval& s, const Symbol& x) {
    return std::to_string(s.lo) + ":" + std::to_string(s.hi) + "/" + x;
  }

  // Try every Complete-Rep application in which the freshly finalized
  // item participates and all other premises are already finalized.
  void combine(std::uint32_t id) {
    const Item item = entries_[id].item;  // copy: entries_ grows below
    if (!item.region.holes.empty()) try_as_parent(id, std::nullopt, 0);
    auto it = parents_by_hole_.find(span_head_key(item.region.span, item.type.head));
    if (it != parents_by_hole_.end()) {
      for (auto [parent, pos] : it->second)
        try_as_parent(parent, id, pos);
    }
  }

  void try_as_parent(std::uint32_t parent,
                     std::optional<std::uint32_t> pinned_child,
                     std::size_t pinned_pos) {
    const Item parent_item = entries_[parent].item;  // copy: entries_ grows
    const std::size_t n = parent_item.region.holes.size();
    std::vector<const std::vector<std::uint32_t>*> candidates(n);
    static const std::vector<std::uint32_t> kEmpty;
    std::vector<std::uint32_t> pinned_single;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned_child && i == pinned_pos) {
        pinned_single = {*pinned_child};
        continue;
      }
      auto it = by_span_head_.find(
          span_head_key(parent_item.region.holes[i], parent_item.type.args[i]));
      candidates[i] = (it == by_span_head_.end()) ? &kEmpty : &it->second;
      if (candidates[i]->empty()) return;
    }
    std::vector<std::uint32_t> chosen(n);
    choose_children(parent, parent_item, candidates, pinned_child, pinned_pos,
                    pinned_single, chosen, 0);
  }

  void choose_children(std::uint32_t parent, const Item& parent_item,
                       const std::vector<const std::vector<std::uint32_t>*>& candidates,
                       std::optional<std::uint32_t> pinned_child,
                       std::size_t pinned_pos,
                       const std::vector<std::uint32_t>& pinned_single,
                       std::vector<std::uint32_t>& chosen, std::size_t i) {
    const std::size_t n = chosen.size();
    if (i == n) {
      apply_complete_rep(parent, parent_item, chosen);
      return;
    }
    const std::vector<std::uint32_t>& options =
        (pinned_child && i == pinned_pos) ? pinned_single : *candidates[i];
    for (std::uint32_t c : options) {
      chosen[i] = c;
      choose_children(parent, parent_item, candidates, pinned_child,
                      pinned_pos, pinned_single, chosen, i + 1);
    }
  }

  void apply_complete_rep(std::uint32_t parent, const Item& parent_item,
                          const std::vector<std::uint32_t>& chosen) {
    const std::size_t n = chosen.size();
    std::vector<Item> child_items;
    child_items.reserve(n);
    std::vector<Weight> child_weights;
    child_weights.reserve(n);
    for (std::uint32_t c : chosen) {
      child_items.push_back(entries_[c].item);
      child_weights.push_back(entries_[c].weight);
    }
    Combinator all_free(n, Slot::free());
    std::optional<Item> merged =
        complete_rep(parent_item, child_items, all_free, trees_);
    if (!merged) return;
    if (merged->region.holes.size() > cfg_.max_holes) return;
    if (trees_.node_count(merged->tree) > cfg_.max_tree_nodes) return;

    std::vector<Combinator> combs =
        enumerate_combinators(parent_item, child_items);
    const Weight parent_weight = entries_[parent].weight;
    for (Combinator& m : combs) {
      Weight w = merge_weight(m, parent_weight, child_weights);
      std::string ek = edge_key(parent, chosen, m);
      if (!edge_keys_.insert(std::move(ek)).second) continue;
      std::uint32_t head = upsert(*merged, w);
      Hyperedge e;
      e.rule = Hyperedge::Rule::CompleteRep;
      e.head = head;
      e.parent = static_cast<std::int32_t>(parent);
      e.children.assign(chosen.begin(), chosen.end());
      e.comb = std::move(m);
      add_edge(std::move(e));
    }
  }

  // All combinators compatible with the chosen children: equal child
  // trees may be Free or Ref, a child tree equal to the parent tree may
  // be Star. Every compatible combinator yields its own hyperedge.
  std::vector<Combinator> enumerate_combinators(
      const Item& parent_item, const std::vector<Item>& children) const {
    const std::size_t n = children.size();
    std::vector<Combinator> out;
    Combinator cur;
    cur.reserve(n);
    enumerate_rec(parent_item, children, n, cur, out);
    return out;
  }

  void enumerate_rec(const Item& parent_item, const std::vector<Item>& children,
                     std::size_t n, Combinator& cur,
                     std::vector<Combinator>& out) const {
    if (cur.size() == n) {
      out.push_back(cur);
      return;
    }
    const std::size_t i = cur.size();
    cur.push_back(Slot::free());
    enumerate_rec(parent_item, children, n, cur, out);
    cur.pop_back();
    if (cfg_.all_free_only) return;
    for (std::size_t j = 0; j < i; ++j) {
      if (cur[j].kind == Slot::Kind::Free &&
          children[j].tree == children[i].tree) {
        cur.push_back(Slot::ref_to(j));
        enumerate_rec(parent_item, children, n, cur, out);
        cur.pop_back();
      }
    }
    if (children[i].tree == parent_item.tree) {
      cur.push_back(Slot::star());
      enumerate_rec(parent_item, children, n, cur, out);
      cur.pop_back();
    }
  }

  std::string edge_key(std::uint32_t parent,
                       const std::vector<std::uint32_t>& children,
                       const Combinator& m) const {
    std::string key = std::to_string(parent);
    for (std::uint32_t c : children) {
      key += ',';
      key += std::to_string(c);
    }
    key += '/';
    key += combinator_to_string(m);
    return key;
  }

  void add_edge(Hyperedge e) { edges_.push_back(std::move(e)); }

  const Grammar* grammar_;
  GrammarIndex index_;
  std::vector<Symbol> seq_;
  EngineConfig cfg_;
  TreeInterner trees_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<Hyperedge> edges_;
  std::unordered_set<std::string> edge_keys_;
  std::priority_queue<AgendaEntry, std::vector<AgendaEntry>,
                      std::greater<AgendaEntry>> agenda_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> by_span_head_;
  std::unordered_map<std::string, std::vector<std::pair<std::uint32_t, std::size_t>>>
      parents_by_hole_;
  std::vector<Weight> pop_weights_;
  bool closed_ = false;
};

// Exhaustive forward chaining: the chart closed under the three rules,
// all hyperedges recorded.
inline Chart forward_chain(const Grammar& g, const std::vector<Symbol>& seq,
                           EngineConfig cfg = {}) {
  Chart chart(g, seq, cfg);
  chart.run(/*stop_at_goal=*/false);
  return chart;
}

// Knuth's generalization of Dijkstra: pop in nondecreasing weight and
// stop at the first finalized goal item.
inline std::optional<std::pair<Item, Weight>> best_first(
    const Grammar& g, const std::vector<Symbol>& seq, EngineConfig cfg = {}) {
  Chart chart(g, seq, cfg);
  chart.run(/*stop_at_goal=*/true);
  auto goals = chart.goal_ids();
  if (goals.empty()) return std::nullopt;
  const auto& e = chart.entries()[goals.front()];
  return std::make_pair(e.item, e.weight);
}

}  // namespace minrep

#endif  // MINREP_ENGINE_HPP
