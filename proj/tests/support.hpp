#ifndef MINREP_TESTS_SUPPORT_HPP
#define MINREP_TESTS_SUPPORT_HPP

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "minrep/grammar.hpp"

// Shared helpers for the randomized tests: grammar/sequence generation
// and an independent CYK recognizer to compare recognition decisions
// against.

namespace support {

using minrep::Grammar;
using minrep::Relation;
using minrep::RelationKind;
using minrep::Symbol;

struct GenOptions {
  std::size_t max_relations = 5;
  std::size_t max_terminals = 4;
  std::size_t max_nonterminals = 4;
  bool unary_allowed = false;
};

// A random grammar with binary internal relations (optionally unary) and
// termination relations. Internal names are drawn from a small pool with
// reuse, so polymorphic relations occur regularly.
inline Grammar random_grammar(std::mt19937& rng, GenOptions opt = {}) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  Grammar g;
  const std::size_t nts = pick(1, opt.max_nonterminals);
  const std::size_t ts = pick(1, opt.max_terminals);
  std::vector<Symbol> nt, t;
  for (std::size_t i = 0; i < nts; ++i) nt.push_back("N" + std::to_string(i));
  for (std::size_t i = 0; i < ts; ++i) t.push_back(std::string(1, char('a' + i)));
  g.nonterminals.insert(nt.begin(), nt.end());
  g.terminals.insert(t.begin(), t.end());
  g.start = nt[0];

  const char* internal_names[] = {"f", "g"};
  const char* termination_names[] = {"u", "v"};
  std::set<std::string> seen;
  const std::size_t total = pick(2, opt.max_relations);
  const std::size_t n_term = pick(1, std::max<std::size_t>(1, total - 1));
  for (std::size_t i = 0; i < n_term; ++i) {
    Relation r;
    r.name = termination_names[pick(0, 1)];
    r.head = nt[pick(0, nts - 1)];
    r.kind = RelationKind::Termination;
    r.terminal = t[pick(0, ts - 1)];
    std::string key = r.name + "|" + r.head + "|" + r.terminal;
    if (!seen.insert(key).second) continue;
    g.relations.push_back(std::move(r));
  }
  for (std::size_t i = g.relations.size(); i < total; ++i) {
    Relation r;
    r.name = internal_names[pick(0, 1)];
    r.head = nt[pick(0, nts - 1)];
    std::size_t arity = (opt.unary_allowed && pick(0, 3) == 0) ? 1 : 2;
    for (std::size_t k = 0; k < arity; ++k) r.children.push_back(nt[pick(0, nts - 1)]);
    std::string key = r.name + "|" + r.head;
    for (const Symbol& c : r.children) key += "|" + c;
    if (!seen.insert(key).second) continue;
    // a name must keep one arity across instantiations
    bool clash = false;
    for (const Relation& prev : g.relations)
      if (prev.name == r.name && prev.arity() != arity) clash = true;
    if (clash) continue;
    g.relations.push_back(std::move(r));
  }
  // validate() requires at least one termination
  if (g.relations.empty() ||
      std::none_of(g.relations.begin(), g.relations.end(), [](const Relation& r) {
        return r.kind == RelationKind::Termination;
      })) {
    Relation r;
    r.name = "u";
    r.head = g.start;
    r.kind = RelationKind::Termination;
    r.terminal = t[0];
    g.relations.push_back(std::move(r));
  }
  return g;
}

// Strings of each length derivable from each nonterminal, by bottom-up
// dynamic programming. Used both to sample positive sequences and as the
// generation side of the CYK check.
inline std::map<Symbol, std::vector<std::set<std::vector<Symbol>>>> derivable(
    const Grammar& g, std::size_t max_len) {
  std::map<Symbol, std::vector<std::set<std::vector<Symbol>>>> out;
  for (const Symbol& s : g.nonterminals)
    out[s].assign(max_len + 1, {});
  for (const Relation& r : g.relations)
    if (r.kind == RelationKind::Termination) out[r.head][1].insert({r.terminal});
  for (std::size_t len = 1; len <= max_len; ++len) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Relation& r : g.relations) {
        if (r.kind != RelationKind::Internal) continue;
        if (r.arity() == 1) {
          for (const auto& s : out[r.children[0]][len])
            changed = out[r.head][len].insert(s).second || changed;
        } else if (r.arity() == 2 && len >= 2) {
          for (std::size_t l = 1; l < len; ++l)
            for (const auto& sl : out[r.children[0]][l])
              for (const auto& sr : out[r.children[1]][len - l]) {
                std::vector<Symbol> cat = sl;
                cat.insert(cat.end(), sr.begin(), sr.end());
                changed = out[r.head][len].insert(std::move(cat)).second || changed;
              }
        }
      }
    }
  }
  return out;
}

// A sequence of length 1..max_len: half the time sampled from the
// derivable strings of the start symbol (when any exist), otherwise
// uniform random tokens.
inline std::vector<Symbol> random_sequence(std::mt19937& rng, const Grammar& g,
                                           std::size_t max_len) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  if (pick(0, 1) == 0) {
    auto langs = derivable(g, max_len);
    std::vector<std::vector<Symbol>> pool;
    for (std::size_t len = 1; len <= max_len; ++len)
      for (const auto& s : langs[g.start][len]) pool.push_back(s);
    if (!pool.empty()) return pool[pick(0, pool.size() - 1)];
  }
  std::vector<Symbol> toks(g.terminals.begin(), g.terminals.end());
  std::vector<Symbol> seq(pick(1, max_len));
  for (Symbol& s : seq) s = toks[pick(0, toks.size() - 1)];
  return seq;
}

// Independent CYK recognition with unary closure; shares nothing with the
// deduction engine.
inline bool cyk_recognizes(const Grammar& g, const std::vector<Symbol>& seq) {
  const std::size_t n = seq.size();
  if (n == 0) return false;
  // table[i][j] = heads deriving seq[i..i+j)
  std::vector<std::vector<std::set<Symbol>>> table(
      n, std::vector<std::set<Symbol>>(n + 1));
  auto unary_close = [&](std::set<Symbol>& cell) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Relation& r : g.relations)
        if (r.kind == RelationKind::Internal && r.arity() == 1 &&
            cell.count(r.children[0]) && !cell.count(r.head)) {
          cell.insert(r.head);
          changed = true;
        }
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (const Relation& r : g.relations)
      if (r.kind == RelationKind::Termination && r.terminal == seq[i])
        table[i][1].insert(r.head);
    unary_close(table[i][1]);
  }
  for (std::size_t len = 2; len <= n; ++len)
    for (std::size_t i = 0; i + len <= n; ++i) {
      for (std::size_t l = 1; l < len; ++l)
        for (const Relation& r : g.relations)
          if (r.kind == RelationKind::Internal && r.arity() == 2 &&
              table[i][l].count(r.children[0]) &&
              table[i + l][len - l].count(r.children[1]))
            table[i][len].insert(r.head);
      unary_close(table[i][len]);
    }
  return table[0][n].count(g.start) > 0;
}

}  // namespace support

#endif  // MINREP_TESTS_SUPPORT_HPP
