#ifndef MINREP_JSON_IO_HPP
#define MINREP_JSON_IO_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "minrep/core.hpp"
#include "minrep/grammar.hpp"

// Serialization: the grammar file format, the template file format, and
// DOT rendering of inferred templates. The JSON schemas mirror the AST
// one to one.

namespace minrep {

using nlohmann::json;

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Grammar files
//
// {
//   "start": "S",
//   "nonterminals": ["S", "A"],
//   "terminals": ["a"],
//   "relations": [{"name": "g", "head": "S", "children": ["A", "A"]}],
//   "terminations": [{"name": "a", "head": "A", "terminal": "a"}]
// }

inline Grammar grammar_from_json(const json& j) {
  try {
    Grammar g;
    g.start = j.at("start").get<std::string>();
    for (const auto& s : j.at("nonterminals"))
      g.nonterminals.insert(s.get<std::string>());
    for (const auto& s : j.at("terminals"))
      g.terminals.insert(s.get<std::string>());
    for (const auto& r : j.at("relations")) {
      Relation rel;
      rel.name = r.at("name").get<std::string>();
      rel.head = r.at("head").get<std::string>();
      for (const auto& c : r.at("children"))
        rel.children.push_back(c.get<std::string>());
      rel.kind = RelationKind::Internal;
      g.relations.push_back(std::move(rel));
    }
    for (const auto& r : j.at("terminations")) {
      Relation rel;
      rel.name = r.at("name").get<std::string>();
      rel.head = r.at("head").get<std::string>();
      rel.kind = RelationKind::Termination;
      rel.terminal = r.at("terminal").get<std::string>();
      g.relations.push_back(std::move(rel));
    }
    return g;
  } catch (const json::exception& e) {
    throw io_error(std::string("bad grammar file: ") + e.what());
  }
}

inline json grammar_to_json(const Grammar& g) {
  json j;
  j["start"] = g.start;
  j["nonterminals"] = json::array();
  for (const Symbol& s : g.nonterminals) j["nonterminals"].push_back(s);
  j["terminals"] = json::array();
  for (const Symbol& s : g.terminals) j["terminals"].push_back(s);
  j["relations"] = json::array();
  j["terminations"] = json::array();
  for (const Relation& r : g.relations) {
    if (r.kind == RelationKind::Internal) {
      j["relations"].push_back(
          {{"name", r.name}, {"head", r.head}, {"children", r.children}});
    } else {
      j["terminations"].push_back(
          {{"name", r.name}, {"head", r.head}, {"terminal", r.terminal}});
    }
  }
  return j;
}

inline Grammar load_grammar_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open grammar file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error(std::string("bad grammar file: ") + e.what());
  }
  return grammar_from_json(j);
}

// ---------------------------------------------------------------------------
// Template files
//
// {"pure": "Prol"}
// {"rep": {"head": ..., "comb": ["free", {"ref": 0}, "star"],
//          "children": [...]}}
// {"id": true}

inline json comb_to_json(const Combinator& m) {
  json out = json::array();
  for (const Slot& s : m) {
    switch (s.kind) {
      case Slot::Kind::Free: out.push_back("free"); break;
      case Slot::Kind::Ref: out.push_back({{"ref", s.ref}}); break;
      case Slot::Kind::Star: out.push_back("star"); break;
    }
  }
  return out;
}

inline Combinator comb_from_json(const json& j) {
  Combinator m;
  for (const auto& s : j) {
    if (s.is_string()) {
      std::string k = s.get<std::string>();
      if (k == "free") m.push_back(Slot::free());
      else if (k == "star") m.push_back(Slot::star());
      else throw io_error("bad combinator slot '" + k + "'");
    } else if (s.is_object() && s.contains("ref")) {
      m.push_back(Slot::ref_to(s.at("ref").get<std::size_t>()));
    } else {
      throw io_error("bad combinator slot");
    }
  }
  return m;
}

inline json expr_to_json(const TemplateExpr& e) {
  switch (e.kind) {
    case TemplateExpr::Kind::Id:
      return {{"id", true}};
    case TemplateExpr::Kind::Pure:
      return {{"pure", e.relation}};
    case TemplateExpr::Kind::Rep: {
      json kids = json::array();
      for (const ExprPtr& c : e.children) kids.push_back(expr_to_json(*c));
      return {{"rep",
               {{"head", expr_to_json(*e.head)},
                {"comb", comb_to_json(e.comb)},
                {"children", kids}}}};
    }
  }
  throw io_error("unreachable expr kind");
}

// The grammar supplies relation signatures for Pure nodes; unknown names
// are rejected later by check_template, not here.
inline ExprPtr expr_from_json(const json& j, const GrammarIndex& gx) {
  try {
    if (j.contains("id")) return id_expr();
    if (j.contains("pure")) {
      std::string name = j.at("pure").get<std::string>();
      const RelationSignature* sig = gx.signature(name);
      std::size_t arity = sig ? sig->arity : 0;
      bool term = sig && sig->kind == RelationKind::Termination;
      return pure_expr(name, arity, term);
    }
    if (j.contains("rep")) {
      const json& r = j.at("rep");
      ExprPtr head = expr_from_json(r.at("head"), gx);
      Combinator m = comb_from_json(r.at("comb"));
      std::vector<ExprPtr> kids;
      for (const auto& c : r.at("children"))
        kids.push_back(expr_from_json(c, gx));
      return rep_expr(std::move(head), std::move(m), std::move(kids));
    }
    throw io_error("template node must be one of id/pure/rep");
  } catch (const json::exception& e) {
    throw io_error(std::string("bad template file: ") + e.what());
  }
}

inline ExprPtr load_template_file(const std::string& path, const GrammarIndex& gx) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open template file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error(std::string("bad template file: ") + e.what());
  }
  return expr_from_json(j, gx);
}

// ---------------------------------------------------------------------------
// DOT rendering
//
// Renders a template program side by side with its evaluated relation
// tree. Subtrees produced by Ref or Star slots share a color with their
// source, making the discovered repeats visible.

namespace render_detail {

struct RNode {
  std::string label;
  std::vector<std::size_t> children;
  int color = 0;  // 0 = none; >0 indexes the palette
};

struct RTree {
  std::vector<RNode> nodes;

  std::size_t add(std::string label) {
    nodes.push_back({std::move(label), {}, 0});
    return nodes.size() - 1;
  }
  std::size_t deep_copy(std::size_t src) {
    std::size_t id = add(nodes[src].label);
    nodes[id].color = nodes[src].color;
    std::vector<std::size_t> kids;
    for (std::size_t c : nodes[src].children) kids.push_back(deep_copy(c));
    nodes[id].children = std::move(kids);
    return id;
  }
  void paint(std::size_t root, int color) {
    nodes[root].color = color;
    for (std::size_t c : nodes[root].children) paint(c, color);
  }
  void collect_holes(std::size_t root, std::vector<std::size_t>& holes) {
    if (nodes[root].label == "_") {
      holes.push_back(root);
      return;
    }
    for (std::size_t c : nodes[root].children) collect_holes(c, holes);
  }
  // replace hole nodes, left to right, by already built subtrees
  void plug(std::size_t root, const std::vector<std::size_t>& fills) {
    std::vector<std::size_t> holes;
    collect_holes(root, holes);
    for (std::size_t i = 0; i < holes.size(); ++i) {
      RNode& h = nodes[holes[i]];
      h.label = nodes[fills[i]].label;
      h.color = h.color ? h.color : nodes[fills[i]].color;
      h.children = nodes[fills[i]].children;
    }
  }
};

// Mirror of evaluate() that tracks which slots duplicated which subtree.
inline std::size_t build_colored(const ExprPtr& e, RTree& t, int& next_color) {
  switch (e->kind) {
    case TemplateExpr::Kind::Id:
      return t.add("_");
    case TemplateExpr::Kind::Pure: {
      std::size_t id = t.add(e->relation);
      for (std::size_t i = 0; i < e->relation_arity; ++i) {
        std::size_t h = t.add("_");  // before indexing: add() reallocates
        t.nodes[id].children.push_back(h);
      }
      return id;
    }
    case TemplateExpr::Kind::Rep: {
      std::size_t head = build_colored(e->head, t, next_color);
      std::vector<std::size_t> outs;
      std::size_t next_free = 0;
      for (const Slot& s : e->comb) {
        switch (s.kind) {
          case Slot::Kind::Free:
            outs.push_back(build_colored(e->children[next_free++], t, next_color));
            break;
          case Slot::Kind::Ref: {
            int color = t.nodes[outs[s.ref]].color;
            if (!color) {
              color = next_color++;
              t.paint(outs[s.ref], color);
            }
            std::size_t copy = t.deep_copy(outs[s.ref]);
            t.paint(copy, color);
            outs.push_back(copy);
            break;
          }
          case Slot::Kind::Star: {
            int color = t.nodes[head].color;
            if (!color) {
              color = next_color++;
              t.paint(head, color);
            }
            std::size_t copy = t.deep_copy(head);
            t.paint(copy, color);
            outs.push_back(copy);
            break;
          }
        }
      }
      t.plug(head, outs);
      return head;
    }
  }
  throw io_error("unreachable expr kind");
}

inline const char* palette(int color) {
  static const char* colors[] = {"gold",       "lightblue", "palegreen",
                                 "lightsalmon", "plum",      "khaki",
                                 "lightcyan",  "mistyrose"};
  return colors[(color - 1) % 8];
}

inline void emit_expr(const TemplateExpr& e, std::string& out, int& next_id,
                      int parent) {
  int id = next_id++;
  std::string label;
  switch (e.kind) {
    case TemplateExpr::Kind::Id: label = "Id"; break;
    case TemplateExpr::Kind::Pure: label = "Pure " + e.relation; break;
    case TemplateExpr::Kind::Rep:
      label = "Rep " + combinator_to_string(e.comb);
      break;
  }
  out += "    t" + std::to_string(id) + " [label=\"" + label + "\"];\n";
  if (parent >= 0)
    out += "    t" + std::to_string(parent) + " -> t" + std::to_string(id) + ";\n";
  if (e.kind == TemplateExpr::Kind::Rep) {
    emit_expr(*e.head, out, next_id, id);
    for (const ExprPtr& c : e.children) emit_expr(*c, out, next_id, id);
  }
}

}  // namespace render_detail

inline std::string render_dot(const ExprPtr& e, const std::vector<Symbol>& seq) {
  using namespace render_detail;
  std::string out = "digraph template {\n  node [shape=box, style=filled, "
                    "fillcolor=white];\n";
  out += "  subgraph cluster_template {\n    label=\"template program\";\n";
  int next_id = 0;
  emit_expr(*e, out, next_id, -1);
  out += "  }\n";

  RTree t;
  int next_color = 1;
  std::size_t root = build_colored(e, t, next_color);
  out += "  subgraph cluster_flow {\n    label=\"computation flow\";\n";
  std::size_t leaf_pos = 0;
  auto walk = [&](auto&& self, std::size_t id) -> void {
    const RNode& n = t.nodes[id];
    std::string label = n.label;
    if (n.children.empty() && n.label != "_" && leaf_pos < seq.size())
      label += "\\n" + seq[leaf_pos++];
    out += "    f" + std::to_string(id) + " [label=\"" + label + "\"";
    if (n.color) out += ", fillcolor=" + std::string(palette(n.color));
    out += "];\n";
    for (std::size_t c : n.children) {
      out += "    f" + std::to_string(id) + " -> f" + std::to_string(c) + ";\n";
      self(self, c);
    }
  };
  walk(walk, root);
  out += "  }\n}\n";
  return out;
}

}  // namespace minrep

#endif  // MINREP_JSON_IO_HPP
