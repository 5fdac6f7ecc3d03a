#ifndef MINREP_GRAMMAR_HPP
#define MINREP_GRAMMAR_HPP

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "minrep/core.hpp"

// Grammar definition and validation, plus the bundled example grammars
// (coffee action planning, simplified jazz harmony).

namespace minrep {

struct unknown_grammar_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Grammar {
  std::set<Symbol> nonterminals;
  std::set<Symbol> terminals;
  std::vector<Relation> relations;  // instantiations; names may repeat
  Symbol start;
};

// Shared shape of all instantiations of one relation name.
struct RelationSignature {
  RelationKind kind;
  std::size_t arity;
};

inline std::map<std::string, RelationSignature> relation_signatures(
    const Grammar& g) {
  std::map<std::string, RelationSignature> sig;
  for (const Relation& r : g.relations) {
    auto it = sig.find(r.name);
    if (it == sig.end())
      sig.emplace(r.name, RelationSignature{r.kind, r.arity()});
  }
  return sig;
}

// Returns every violated invariant; empty means ok.
inline std::vector<std::string> validate(const Grammar& g) {
  std::vector<std::string> bad;
  if (g.nonterminals.count(g.start) == 0)
    bad.push_back("start symbol '" + g.start + "' is not a declared nonterminal");
  for (const Symbol& s : g.nonterminals)
    if (g.terminals.count(s))
      bad.push_back("symbol '" + s + "' declared both nonterminal and terminal");

  bool any_termination = false;
  std::map<std::string, RelationSignature> sig;
  for (const Relation& r : g.relations) {
    if (g.nonterminals.count(r.head) == 0)
      bad.push_back("relation " + r.name + ": head '" + r.head +
                    "' is not a declared nonterminal");
    for (const Symbol& c : r.children)
      if (g.nonterminals.count(c) == 0)
        bad.push_back("relation " + r.name + ": child '" + c +
                      "' is not a declared nonterminal");
    if (r.kind == RelationKind::Internal) {
      if (r.arity() > 2)
        bad.push_back("relation " + r.name + ": arity > 2");
      if (r.arity() == 0)
        bad.push_back("relation " + r.name + ": internal relation with arity 0");
    } else {
      any_termination = true;
      if (!r.children.empty())
        bad.push_back("relation " + r.name + ": termination relation with children");
      if (g.terminals.count(r.terminal) == 0)
        bad.push_back("relation " + r.name + ": terminal '" + r.terminal +
                      "' is not declared");
    }
    auto it = sig.find(r.name);
    if (it == sig.end()) {
      sig.emplace(r.name, RelationSignature{r.kind, r.arity()});
    } else if (it->second.kind != r.kind || it->second.arity != r.arity()) {
      bad.push_back("relation " + r.name +
                    ": instantiations disagree on kind or arity");
    }
  }
  if (!any_termination) bad.push_back("no termination relation");
  return bad;
}

// ---------------------------------------------------------------------------
// Bundled grammars.
//
// The coffee grammar follows the usual hierarchical decomposition of the
// task: serve = prepare both ingredients, then brew; each ingredient is
// measured and loaded into the machine. The two preparation subtasks are
// instantiations of one polymorphic relation, so their computation flows
// coincide even though the surface actions differ.
//
// The jazz grammar is a simplified harmony grammar over root-and-quality
// chord symbols (12 roots; qualities major, minor seventh, dominant
// seventh): Prol duplicates a chord, D5 prepares a chord by the minor
// seventh built a fifth above, AppD prepares it by the dominant seventh a
// fifth above, and Chord terminates a symbol into its surface token.

namespace detail {
inline const std::vector<std::string>& chord_roots() {
  static const std::vector<std::string> roots = {"C", "Db", "D",  "Eb", "E",  "F",
                                                 "Gb", "G", "Ab", "A",  "Bb", "B"};
  return roots;
}
}  // namespace detail

inline Grammar coffee_grammar() {
  Grammar g;
  g.start = "Coffee";
  g.nonterminals = {"Coffee",       "Ingredients",  "GroundTask",
                    "WaterTask",    "MeasureGround", "MeasureWater",
                    "LoadGround",   "LoadWater",     "BrewTask"};
  g.terminals = {"measure_coffee", "load_coffee", "measure_water",
                 "load_water", "brew"};
  auto internal = [&](std::string name, Symbol head, std::vector<Symbol> kids) {
    g.relations.push_back({std::move(name), std::move(head), std::move(kids),
                           RelationKind::Internal, ""});
  };
  auto termination = [&](std::string name, Symbol head, Symbol tok) {
    g.relations.push_back(
        {std::move(name), std::move(head), {}, RelationKind::Termination, std::move(tok)});
  };
  internal("Serve", "Coffee", {"Ingredients", "BrewTask"});
  internal("Pair", "Ingredients", {"GroundTask", "WaterTask"});
  internal("Prep", "GroundTask", {"MeasureGround", "LoadGround"});
  internal("Prep", "WaterTask", {"MeasureWater", "LoadWater"});
  // optional polymorphic refinement step; adds no surface actions but
  // makes the plan space properly ambiguous
  internal("Refine", "GroundTask", {"GroundTask"});
  internal("Refine", "WaterTask", {"WaterTask"});
  internal("Refine", "BrewTask", {"BrewTask"});
  termination("Measure", "MeasureGround", "measure_coffee");
  termination("Measure", "MeasureWater", "measure_water");
  termination("Load", "LoadGround", "load_coffee");
  termination("Load", "LoadWater", "load_water");
  termination("Brew", "BrewTask", "brew");
  return g;
}

inline Grammar jazz_grammar() {
  Grammar g;
  const auto& roots = detail::chord_roots();
  auto token = [&](int root, int quality) {
    static const char* suffix[] = {"", "m7", "7"};
    return roots[((root % 12) + 12) % 12] + suffix[quality];
  };
  // nonterminal for a chord = its token plus a marker, keeping the two
  // namespaces disjoint
  auto symbol = [&](int root, int quality) { return token(root, quality) + "^"; };
  g.start = symbol(0, 0);
  for (int r = 0; r < 12; ++r)
    for (int q = 0; q < 3; ++q) {
      Symbol s = symbol(r, q);
      g.nonterminals.insert(s);
      g.terminals.insert(token(r, q));
      g.relations.push_back({"Chord", s, {}, RelationKind::Termination, token(r, q)});
    }
  for (int r = 0; r < 12; ++r)
    for (int q = 0; q < 3; ++q) {
      Symbol s = symbol(r, q);
      // prolongation: a chord spans two of itself
      g.relations.push_back({"Prol", s, {s, s}, RelationKind::Internal, ""});
      // descending fifth: prepared by the minor seventh a fifth above
      g.relations.push_back(
          {"D5", s, {symbol(r + 7, 1), s}, RelationKind::Internal, ""});
      // applied dominant: prepared by the dominant seventh a fifth above
      g.relations.push_back(
          {"AppD", s, {symbol(r + 7, 2), s}, RelationKind::Internal, ""});
    }
  return g;
}

inline Grammar builtin_grammar(const std::string& name) {
  if (name == "coffee") return coffee_grammar();
  if (name == "jazz") return jazz_grammar();
  throw unknown_grammar_error("unknown builtin grammar '" + name + "'");
}

// The bundled demonstration sequences that go with the builtin grammars.
inline std::vector<Symbol> builtin_sequence(const std::string& name) {
  if (name == "coffee")
    return {"measure_coffee", "load_coffee", "measure_water", "load_water",
            "brew"};
  if (name == "jazz")
    // a prolonged tonic elaborated by a chain of secondary ii-V cadences
    return {"C",  "Abm7", "Db7", "Gbm7", "B7",
            "Em7", "A7",  "Dm7", "G7",  "C"};
  throw unknown_grammar_error("unknown builtin grammar '" + name + "'");
}

// ---------------------------------------------------------------------------
// Lookup helpers used by the engine and the checkers.

struct GrammarIndex {
  const Grammar* grammar;
  std::map<std::string, RelationSignature> signatures;
  std::map<std::string, std::vector<const Relation*>> by_name;
  std::map<Symbol, std::vector<const Relation*>> terminations_by_terminal;

  explicit GrammarIndex(const Grammar& g) : grammar(&g) {
    signatures = relation_signatures(g);
    for (const Relation& r : g.relations) {
      by_name[r.name].push_back(&r);
      if (r.kind == RelationKind::Termination)
        terminations_by_terminal[r.terminal].push_back(&r);
    }
  }

  const RelationSignature* signature(const std::string& name) const {
    auto it = signatures.find(name);
    return it == signatures.end() ? nullptr : &it->second;
  }

  const std::vector<const Relation*>* instances(const std::string& name) const {
    auto it = by_name.find(name);
    return it == by_name.end() ? nullptr : &it->second;
  }
};

}  // namespace minrep

#endif  // MINREP_GRAMMAR_HPP
