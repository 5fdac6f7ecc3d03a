#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "minrep/analysis.hpp"
#include "minrep/oracle.hpp"
#include "support.hpp"

using namespace minrep;

namespace {

Grammar sharing_toy() {
  Grammar g;
  g.start = "S";
  g.nonterminals = {"S", "A"};
  g.terminals = {"a"};
  g.relations.push_back({"g", "S", {"A", "A"}, RelationKind::Internal, ""});
  g.relations.push_back({"a", "A", {}, RelationKind::Termination, "a"});
  return g;
}

ExprPtr shared_template() {
  return rep_expr(pure_expr("g", 2, false), {Slot::free(), Slot::ref_to(0)},
                  {pure_expr("a", 0, true)});
}

}  // namespace

TEST_CASE("sharing toy has a unique minimal template of size three") {
  Chart chart = forward_chain(sharing_toy(), {"a", "a"});
  auto sub = extract_minimal(chart);
  CHECK(sub.goal_weight == 3);
  auto templates = enumerate_minimal(sub, 10);
  REQUIRE(templates.size() == 1);
  CHECK(expr_equal(*templates[0], *shared_template()));
  CHECK(size(*templates[0]) == 3);
}

TEST_CASE("sharing toy distribution holds the trivial embedding too") {
  Chart chart = forward_chain(sharing_toy(), {"a", "a"});
  auto dist = size_distribution(chart);
  REQUIRE(dist.counts.size() == 2);
  CHECK(dist.counts.at(3) == 1);
  CHECK(dist.counts.at(4) == 1);
  CHECK(dist.total() == 2);
  CHECK(dist.min_size() == 3);
}

TEST_CASE("extraction works on a best-first chart") {
  Grammar g = sharing_toy();
  Chart chart(g, {"a", "a"}, {});
  chart.run(/*stop_at_goal=*/true);
  CHECK_FALSE(chart.closed());
  auto sub = extract_minimal(chart);
  CHECK(sub.goal_weight == 3);
  auto templates = enumerate_minimal(sub, 10);
  REQUIRE_FALSE(templates.empty());
  CHECK(expr_equal(*templates[0], *shared_template()));
}

TEST_CASE("distribution requires a closed chart") {
  Grammar g = sharing_toy();
  Chart chart(g, {"a", "a"}, {});
  chart.run(/*stop_at_goal=*/true);
  CHECK_THROWS_AS(size_distribution(chart), std::logic_error);
}

TEST_CASE("extraction without a goal reports no parse") {
  Chart chart = forward_chain(sharing_toy(), {"a"});
  // single token: S needs two leaves
  CHECK_THROWS_AS(extract_minimal(chart), no_parse_error);
}

TEST_CASE("enumeration respects the limit") {
  std::mt19937 rng(23);
  for (int i = 0; i < 30; ++i) {
    Grammar g = support::random_grammar(rng);
    auto seq = support::random_sequence(rng, g, 4);
    EngineConfig cfg;
    cfg.max_holes = seq.size();
    Chart chart = forward_chain(g, seq, cfg);
    if (!chart.goal_weight()) continue;
    auto sub = extract_minimal(chart);
    auto one = enumerate_minimal(sub, 1);
    auto many = enumerate_minimal(sub, 50);
    CHECK(one.size() == 1);
    CHECK(many.size() >= 1);
    CHECK(many.size() <= 50);
    CHECK(expr_equal(*one[0], *many[0]));
    for (const auto& t : many) CHECK(size(*t) == sub.goal_weight);
    // pairwise distinct
    for (std::size_t x = 0; x < many.size(); ++x)
      for (std::size_t y = x + 1; y < many.size(); ++y)
        CHECK_FALSE(expr_equal(*many[x], *many[y]));
  }
}

TEST_CASE("check accepts exactly the valid templates") {
  Grammar g = sharing_toy();
  std::vector<Symbol> seq = {"a", "a"};
  SECTION("valid template") {
    CHECK(check_template(g, shared_template(), seq).ok);
  }
  SECTION("unknown relation") {
    auto e = pure_expr("zzz", 0, true);
    auto r = check_template(g, e, {"a"});
    CHECK_FALSE(r.ok);
    CHECK(r.reason.find("unknown relation") != std::string::npos);
  }
  SECTION("open template") {
    auto e = pure_expr("g", 2, false);
    auto r = check_template(g, e, seq);
    CHECK_FALSE(r.ok);
    CHECK(r.reason.find("nonzero arity") != std::string::npos);
  }
  SECTION("wrong yield length") {
    auto r = check_template(g, shared_template(), {"a", "a", "a"});
    CHECK_FALSE(r.ok);
    CHECK(r.reason.find("yield mismatch") != std::string::npos);
  }
  SECTION("wrong token") {
    Grammar g2 = g;
    g2.terminals.insert("b");
    g2.relations.push_back({"b", "A", {}, RelationKind::Termination, "b"});
    auto r = check_template(g2, shared_template(), {"a", "b"});
    CHECK_FALSE(r.ok);
    CHECK(r.reason.find("yield mismatch") != std::string::npos);
  }
  SECTION("start symbol mismatch") {
    Grammar g2 = g;
    g2.nonterminals.insert("T");
    g2.start = "T";
    g2.relations.push_back({"u", "T", {}, RelationKind::Termination, "a"});
    auto r = check_template(g2, shared_template(), seq);
    CHECK_FALSE(r.ok);
    CHECK(r.reason.find("start-symbol mismatch") != std::string::npos);
  }
}

TEST_CASE("every enumerated minimal template passes the checker") {
  std::mt19937 rng(31);
  for (int i = 0; i < 40; ++i) {
    Grammar g = support::random_grammar(rng);
    auto seq = support::random_sequence(rng, g, 5);
    EngineConfig cfg;
    cfg.max_holes = seq.size();
    Chart chart = forward_chain(g, seq, cfg);
    if (!chart.goal_weight()) continue;
    auto templates = enumerate_minimal(extract_minimal(chart), 20);
    for (const auto& t : templates) {
      auto r = check_template(g, t, seq);
      CAPTURE(i, expr_to_string(*t), r.reason);
      CHECK(r.ok);
    }
  }
}
