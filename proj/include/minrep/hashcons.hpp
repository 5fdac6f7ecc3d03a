#ifndef MINREP_HASHCONS_HPP
#define MINREP_HASHCONS_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "minrep/core.hpp"

// Hash-consed relation trees. Structurally equal trees intern to the same
// id, so the repeat checks of the deduction system reduce to id
// comparison. An interner is engine-local.

namespace minrep {

using TreeId = std::uint32_t;

class TreeInterner {
 public:
  static constexpr TreeId kHole = 0;

  struct Node {
    bool is_hole = false;
    std::string relation;
    bool terminates = false;
    std::vector<TreeId> children;
    std::size_t arity = 0;       // number of hole leaves
    std::size_t node_count = 0;  // relation nodes, holes excluded
  };

  TreeInterner() {
    Node hole;
    hole.is_hole = true;
    hole.arity = 1;
    nodes_.push_back(std::move(hole));
  }

  TreeId hole() const { return kHole; }

  TreeId make(const std::string& relation, bool terminates,
              std::vector<TreeId> children) {
    std::string key = relation;
    key += terminates ? '!' : '(';
    for (TreeId c : children) {
      key += std::to_string(c);
      key += ',';
    }
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
    Node n;
    n.relation = relation;
    n.terminates = terminates;
    n.node_count = 1;
    for (TreeId c : children) {
      n.arity += nodes_[c].arity;
      n.node_count += nodes_[c].node_count;
    }
    n.children = std::move(children);
    TreeId id = static_cast<TreeId>(nodes_.size());
    nodes_.push_back(std::move(n));
    table_.emplace(std::move(key), id);
    return id;
  }

  TreeId intern(const CompTree& t) {
    if (t.is_hole) return kHole;
    std::vector<TreeId> kids;
    kids.reserve(t.children.size());
    for (const TreePtr& c : t.children) kids.push_back(intern(*c));
    return make(t.relation, t.terminates, std::move(kids));
  }

  const Node& operator[](TreeId id) const { return nodes_[id]; }
  std::size_t arity(TreeId id) const { return nodes_[id].arity; }
  std::size_t node_count(TreeId id) const { return nodes_[id].node_count; }

  // Replace the holes of `t`, left to right, by `fills`.
  TreeId plug(TreeId t, const std::vector<TreeId>& fills) {
    std::size_t next = 0;
    TreeId out = plug_rec(t, fills, next);
    return out;
  }

  TreePtr materialize(TreeId id) const {
    const Node& n = nodes_[id];
    if (n.is_hole) return hole_tree();
    std::vector<TreePtr> kids;
    kids.reserve(n.children.size());
    for (TreeId c : n.children) kids.push_back(materialize(c));
    return node_tree(n.relation, n.terminates, std::move(kids));
  }

  std::string to_string(TreeId id) const {
    const Node& n = nodes_[id];
    if (n.is_hole) return "_";
    if (n.children.empty()) return n.relation;
    std::string out = n.relation + "(";
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i) out += ",";
      out += to_string(n.children[i]);
    }
    out += ")";
    return out;
  }

 private:
  TreeId plug_rec(TreeId t, const std::vector<TreeId>& fills, std::size_t& next) {
    const Node n = nodes_[t];  // copy; nodes_ may reallocate below
    if (n.is_hole) return fills.at(next++);
    if (n.children.empty()) return t;
    std::vector<TreeId> kids;
    kids.reserve(n.children.size());
    for (TreeId c : n.children) kids.push_back(plug_rec(c, fills, next));
    return make(n.relation, n.terminates, std::move(kids));
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, TreeId> table_;
};

}  // namespace minrep

#endif  // MINREP_HASHCONS_HPP
