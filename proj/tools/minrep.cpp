// Command line front end: parse / histogram / check / render / oracle.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minrep/analysis.hpp"
#include "minrep/core.hpp"
#include "minrep/engine.hpp"
#include "minrep/grammar.hpp"
#include "minrep/json_io.hpp"
#include "minrep/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoParse = 1;
constexpr int kExitBadInput = 2;

struct CommonArgs {
  std::string grammar;
  std::vector<std::string> tokens;
  std::string seq_file;
  std::size_t max_holes = 3;
  std::size_t max_tree_nodes = 0;
  std::string format = "text";
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("grammar", a.grammar,
                  "grammar file, or builtin name (jazz, coffee)")
      ->required();
  cmd->add_option("tokens", a.tokens, "sequence tokens");
  cmd->add_option("--seq-file", a.seq_file, "read tokens, one per line");
  cmd->add_option("--max-holes", a.max_holes, "max holes per chart item");
  cmd->add_option("--max-tree-nodes", a.max_tree_nodes,
                  "max relation nodes per item tree (0 = 2x sequence length)");
}

bool is_builtin(const std::string& name) {
  return (name == "jazz" || name == "coffee") &&
         !std::filesystem::exists(name);
}

// exits with kExitBadInput on any problem
minrep::Grammar resolve_grammar(const std::string& arg) {
  minrep::Grammar g;
  try {
    g = is_builtin(arg) ? minrep::builtin_grammar(arg)
                        : minrep::load_grammar_file(arg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::exit(kExitBadInput);
  }
  auto violations = minrep::validate(g);
  if (!violations.empty()) {
    std::cerr << "invalid grammar:\n";
    for (const auto& v : violations) std::cerr << "  " << v << "\n";
    std::exit(kExitBadInput);
  }
  return g;
}

std::vector<minrep::Symbol> resolve_sequence(const CommonArgs& a) {
  if (!a.seq_file.empty()) {
    std::ifstream in(a.seq_file);
    if (!in) {
      std::cerr << "error: cannot open sequence file '" << a.seq_file << "'\n";
      std::exit(kExitBadInput);
    }
    std::vector<minrep::Symbol> seq;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) seq.push_back(line);
    return seq;
  }
  if (!a.tokens.empty()) return a.tokens;
  if (is_builtin(a.grammar)) return minrep::builtin_sequence(a.grammar);
  std::cerr << "error: no sequence given\n";
  std::exit(kExitBadInput);
}

minrep::EngineConfig engine_config(const CommonArgs& a, bool all_free = false) {
  minrep::EngineConfig cfg;
  cfg.max_holes = a.max_holes;
  cfg.max_tree_nodes = a.max_tree_nodes;
  cfg.all_free_only = all_free;
  return cfg;
}

int run_parse(const CommonArgs& a, bool all_minimal, std::size_t limit,
              bool exhaustive) {
  minrep::Grammar g = resolve_grammar(a.grammar);
  auto seq = resolve_sequence(a);
  if (seq.empty()) {
    std::cerr << "error: empty sequence\n";
    return kExitBadInput;
  }
  minrep::Chart chart(g, seq, engine_config(a));
  try {
    chart.run(/*stop_at_goal=*/!(all_minimal || exhaustive));
  } catch (const minrep::bounded_search_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  if (!chart.goal_weight()) {
    if (a.format == "json")
      std::cout << "{\"minimal_size\": null, \"templates\": []}\n";
    else
      std::cout << "no parse\n";
    return kExitNoParse;
  }
  auto sub = minrep::extract_minimal(chart);
  auto templates = minrep::enumerate_minimal(sub, all_minimal ? limit : 1);
  if (a.format == "json") {
    minrep::json out;
    out["minimal_size"] = sub.goal_weight;
    out["templates"] = minrep::json::array();
    for (const auto& t : templates)
      out["templates"].push_back(minrep::expr_to_json(*t));
    std::cout << out.dump(2) << "\n";
  } else if (a.format == "dot") {
    std::cout << minrep::render_dot(templates.front(), seq);
  } else {
    std::cout << "minimal size: " << sub.goal_weight << "\n";
    for (const auto& t : templates)
      std::cout << "  " << minrep::expr_to_string(*t) << "\n";
  }
  return kExitOk;
}

int run_histogram(const CommonArgs& a, bool bars) {
  minrep::Grammar g = resolve_grammar(a.grammar);
  auto seq = resolve_sequence(a);
  if (seq.empty()) {
    std::cerr << "error: empty sequence\n";
    return kExitBadInput;
  }
  minrep::Chart chart(g, seq, engine_config(a));
  try {
    chart.run(/*stop_at_goal=*/false);
  } catch (const minrep::bounded_search_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  minrep::SizeDistribution dist;
  try {
    dist = minrep::size_distribution(chart);
  } catch (const minrep::count_divergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoParse;
  }
  if (a.format == "json") {
    minrep::json rows = minrep::json::array();
    for (const auto& [s, c] : dist.counts)
      rows.push_back({{"size", s}, {"count", c.str()}});
    std::cout << minrep::json({{"histogram", rows},
                               {"total", dist.total().str()}})
                     .dump(2)
              << "\n";
  } else {
    for (const auto& [s, c] : dist.counts) {
      std::cout << s << "\t" << c.str();
      if (bars) {
        // log-ish bar so huge counts stay printable
        std::size_t len = c.str().size();
        std::cout << "\t" << std::string(len, '#');
      }
      std::cout << "\n";
    }
  }
  return dist.counts.empty() ? kExitNoParse : kExitOk;
}

int run_check(const CommonArgs& a, const std::string& template_file) {
  minrep::Grammar g = resolve_grammar(a.grammar);
  auto seq = resolve_sequence(a);
  minrep::GrammarIndex gx(g);
  minrep::ExprPtr e;
  try {
    e = minrep::load_template_file(template_file, gx);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitBadInput;
  }
  auto result = minrep::check_template(g, e, seq);
  if (result.ok) {
    std::cout << "accept\n";
    return kExitOk;
  }
  std::cout << "reject: " << result.reason << "\n";
  return kExitNoParse;
}

int run_render(const CommonArgs& a) {
  if (a.format != "dot" && a.format != "text") {
    std::cerr << "error: unknown format '" << a.format << "'\n";
    return kExitBadInput;
  }
  minrep::Grammar g = resolve_grammar(a.grammar);
  auto seq = resolve_sequence(a);
  minrep::Chart chart(g, seq, engine_config(a));
  chart.run(/*stop_at_goal=*/true);
  if (!chart.goal_weight()) {
    std::cout << "no parse\n";
    return kExitNoParse;
  }
  auto sub = minrep::extract_minimal(chart);
  auto templates = minrep::enumerate_minimal(sub, 1);
  if (a.format == "text") {
    std::cout << minrep::expr_to_string(*templates.front()) << "\n";
    auto tree = minrep::evaluate(templates.front());
    std::cout << chart.trees().to_string(chart.trees().intern(*tree)) << "\n";
  } else {
    std::cout << minrep::render_dot(templates.front(), seq);
  }
  return kExitOk;
}

int run_oracle(const CommonArgs& a, std::size_t max_size) {
  minrep::Grammar g = resolve_grammar(a.grammar);
  auto seq = resolve_sequence(a);
  try {
    auto all = minrep::oracle_enumerate(g, seq, max_size);
    for (const auto& e : all)
      std::cout << minrep::size(*e) << "\t" << minrep::expr_to_string(*e) << "\n";
    auto census = minrep::oracle_census(g, seq, max_size);
    std::cerr << "templates up to size " << max_size << ": "
              << census.total().str() << "\n";
    return all.empty() ? kExitNoParse : kExitOk;
  } catch (const minrep::oracle_bound_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimal template program inference over relational grammars"};
  app.require_subcommand(1);

  CommonArgs parse_args;
  bool all_minimal = false;
  std::size_t limit = 10;
  bool flag_best_first = false, flag_exhaustive = false;
  auto* parse = app.add_subcommand("parse", "infer minimal template programs");
  add_common(parse, parse_args);
  parse->add_flag("--all-minimal", all_minimal, "enumerate all minimal templates");
  parse->add_option("--limit", limit, "max templates to print");
  parse->add_flag("--best-first", flag_best_first, "stop at first goal (default)");
  parse->add_flag("--exhaustive", flag_exhaustive, "run the chart to closure");
  parse->add_option("--format", parse_args.format, "text, json, or dot");

  CommonArgs hist_args;
  bool bars = false;
  auto* hist = app.add_subcommand("histogram", "template size distribution");
  add_common(hist, hist_args);
  hist->add_flag("--bars", bars, "render text bars");
  hist->add_option("--format", hist_args.format, "text or json");

  CommonArgs check_args;
  std::string template_file;
  auto* check = app.add_subcommand("check", "verify a template against a sequence");
  check->add_option("grammar", check_args.grammar,
                    "grammar file, or builtin name (jazz, coffee)")
      ->required();
  check->add_option("template", template_file, "template JSON file")->required();
  check->add_option("tokens", check_args.tokens, "sequence tokens");
  check->add_option("--seq-file", check_args.seq_file, "read tokens, one per line");

  CommonArgs render_args;
  render_args.format = "dot";
  auto* render = app.add_subcommand("render", "render the minimal template");
  add_common(render, render_args);
  render->add_option("--format", render_args.format, "dot or text");

  CommonArgs oracle_args;
  std::size_t oracle_max_size = 8;
  auto* oracle = app.add_subcommand("oracle",
                                    "brute-force enumeration (testing only)");
  add_common(oracle, oracle_args);
  oracle->add_option("--max-size", oracle_max_size, "size cap");

  CLI11_PARSE(app, argc, argv);

  try {
    if (parse->parsed())
      return run_parse(parse_args, all_minimal, limit,
                       flag_exhaustive && !flag_best_first);
    if (hist->parsed()) return run_histogram(hist_args, bars);
    if (check->parsed()) return run_check(check_args, template_file);
    if (render->parsed()) return run_render(render_args);
    if (oracle->parsed()) return run_oracle(oracle_args, oracle_max_size);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
