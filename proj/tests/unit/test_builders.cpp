#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support/fixtures.hpp"
#include "dtsolve/builders.hpp"
#include "dtsolve/solvers.hpp"

using namespace dtsolve;
namespace fix = dtsolve::testing;

TEST_SUITE_BEGIN("builders");

TEST_CASE("default md order is S,T,P,D") {
  const ValidatedProblem problem = fix::md_problem();
  const std::vector<int> order = default_decision_tree_order(problem);
  std::vector<std::string> names;
  for (int v : order) names.push_back(problem.var(v).name);
  CHECK(names == std::vector<std::string>{"S", "T", "P", "D"});
}

TEST_CASE("md decision tree has 16 leaves, 13 chance and 2 decision nodes at 30 ops") {
  const ValidatedProblem problem = fix::md_problem();
  OpCounter ctx;
  const Tree tree = build_decision_tree(problem, default_decision_tree_order(problem), ctx);
  CHECK(tree.leaves.size() == 16);
  CHECK(tree.chance_node_count() == 13);
  CHECK(tree.decision_node_count() == 2);
  CHECK(ctx.report().representation.total() == 30);
  CHECK(ctx.report().solution.total() == 0);

  // Root chance edges carry the revised marginal Pr(S).
  const TreeNode& root = tree.nodes[tree.root];
  CHECK(root.kind == NodeKind::Chance);
  CHECK(problem.var(root.variable).name == "S");
  CHECK(*root.edges[0].probability == doctest::Approx(0.3075).epsilon(1e-12));
}

TEST_CASE("a problem without decision variables builds a pure probability tree") {
  ProblemDefinition def;
  def.name = "chance-pair";
  def.variables = {{"A", VariableKind::Chance, {"a", "~a"}},
                   {"B", VariableKind::Chance, {"b", "~b"}}};
  def.cpts = {{0, {}, {0.4, 0.6}}, {1, {0}, {0.2, 0.8, 0.7, 0.3}}};
  def.utility.scope = {1};
  def.utility.entries = {1.0, 2.0};
  const ValidatedProblem problem = validate_problem(def);
  OpCounter ctx;
  const Tree tree = build_decision_tree(problem, default_decision_tree_order(problem), ctx);
  CHECK(tree.decision_node_count() == 0);
  CHECK(tree.leaves.size() == 4);
}

TEST_CASE("order placing T before its observation is rejected") {
  const ValidatedProblem problem = fix::md_problem();
  // T, S, P, D: T observes S, so S must precede it.
  const std::vector<int> order = {problem.index_of("T"), problem.index_of("S"),
                                  problem.index_of("P"), problem.index_of("D")};
  OpCounter ctx;
  CHECK_THROWS_WITH_AS(build_decision_tree(problem, order, ctx),
                       doctest::Contains("E_ORDER_VIOLATES_INFORMATION"), Error);
}

TEST_CASE("a vanishing conditioning event propagates out of the builder") {
  // B is deterministic, so revising toward the order (B, A) divides by
  // Pr(B=~b) = 0.
  ProblemDefinition def;
  def.name = "vanishing";
  def.variables = {{"A", VariableKind::Chance, {"a", "~a"}},
                   {"B", VariableKind::Chance, {"b", "~b"}}};
  def.cpts = {{0, {}, {0.5, 0.5}}, {1, {0}, {1.0, 0.0, 1.0, 0.0}}};
  def.utility.scope = {0};
  def.utility.entries = {1.0, 2.0};
  const ValidatedProblem problem = validate_problem(def);
  OpCounter ctx;
  const std::vector<int> order = {1, 0};
  CHECK_THROWS_WITH_AS(build_decision_tree(problem, order, ctx),
                       doctest::Contains("E_ZERO_MARGINAL"), Error);
}

TEST_CASE("md scenario tree carries the joint path probabilities at 12 ops") {
  const ValidatedProblem problem = fix::md_problem();
  OpCounter ctx;
  const Tree tree = build_scenario_tree(problem, default_decision_tree_order(problem), ctx);
  CHECK(ctx.report().representation.total() == 12);
  CHECK(tree.leaves.size() == 16);
  for (NodeId leaf : tree.leaves) CHECK(tree.nodes[leaf].path_probability.has_value());
  CHECK(*tree.nodes[tree.leaves.front()].path_probability ==
        doctest::Approx(0.0560).epsilon(1e-9));
  // Chance edges carry no probabilities in a scenario tree.
  for (const TreeNode& node : tree.nodes) {
    if (node.kind != NodeKind::Chance) continue;
    for (const Edge& edge : node.edges) CHECK_FALSE(edge.probability.has_value());
  }
}

TEST_CASE("deterministic chain yields zero-one path probabilities") {
  ProblemDefinition def;
  def.name = "deterministic";
  def.variables = {{"A", VariableKind::Chance, {"a", "~a"}},
                   {"B", VariableKind::Chance, {"b", "~b"}},
                   {"T", VariableKind::Decision, {"t", "~t"}}};
  def.cpts = {{0, {}, {1.0, 0.0}}, {1, {0}, {0.0, 1.0, 1.0, 0.0}}};
  def.observations = {{}, {}, {}};
  def.utility.scope = {2, 1};
  def.utility.entries = {5.0, 1.0, 0.0, 2.0};
  const ValidatedProblem problem = validate_problem(def);
  OpCounter ctx;
  const Tree tree = build_scenario_tree(problem, default_decision_tree_order(problem), ctx);
  for (NodeId leaf : tree.leaves) {
    const double pi = *tree.nodes[leaf].path_probability;
    CHECK((pi == doctest::Approx(0.0) || pi == doctest::Approx(1.0)));
  }
}

TEST_CASE("scenario path probabilities sum to one under any fixed strategy") {
  for (std::uint64_t seed = 11; seed <= 14; ++seed) {
    const ValidatedProblem problem = fix::random_problem(4, 1, seed);
    OpCounter ctx;
    const Tree tree = build_scenario_tree(problem, default_decision_tree_order(problem), ctx);
    const auto strategies = enumerate_strategies(tree);
    const Strategy& fixed = strategies.front();
    double sum = 0.0;
    for (NodeId leaf : tree.leaves) {
      if (strategy_indicator(fixed, leaf, tree)) sum += *tree.nodes[leaf].path_probability;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("md game tree groups eight T nodes into two information sets at 0 ops") {
  const ValidatedProblem problem = fix::md_problem();
  OpCounter ctx;
  const Tree tree = build_game_tree(problem, ctx);
  CHECK(ctx.report().total() == 0);
  CHECK(tree.chance_node_count() == 7);
  CHECK(tree.decision_node_count() == 8);
  CHECK(tree.leaves.size() == 16);

  REQUIRE(tree.information_sets.size() == 2);
  CHECK(tree.information_sets[0].id == "T[S:s]");
  CHECK(tree.information_sets[1].id == "T[S:~s]");
  CHECK(tree.information_sets[0].members.size() == 4);
  CHECK(tree.information_sets[1].members.size() == 4);

  // Chance levels: one D node, two P nodes, four S nodes, in causal order.
  CHECK(problem.var(tree.nodes[tree.root].variable).name == "D");
  // Edges carry the CPT values verbatim.
  CHECK(*tree.nodes[tree.root].edges[0].probability == doctest::Approx(0.10));
}

TEST_CASE("a decision observing nothing forms one information set of all its nodes") {
  ProblemDefinition def = fix::md_definition();
  def.observations[3] = {};
  const ValidatedProblem problem = validate_problem(def);
  OpCounter ctx;
  const Tree tree = build_game_tree(problem, ctx);
  REQUIRE(tree.information_sets.size() == 1);
  CHECK(tree.information_sets[0].members.size() == 8);
  CHECK(tree.information_sets[0].id == "T");
}

TEST_CASE("a decision observing every chance variable degenerates to singletons") {
  ProblemDefinition def = fix::md_definition();
  def.observations[3] = {0, 1, 2};
  const ValidatedProblem problem = validate_problem(def);
  OpCounter ctx;
  const Tree tree = build_game_tree(problem, ctx);
  CHECK(tree.information_sets.size() == 8);
  for (const InformationSet& set : tree.information_sets) CHECK(set.members.size() == 1);
}

TEST_CASE("coalescing the md decision tree merges the deepest chance layer") {
  const ValidatedProblem problem = fix::md_problem();
  OpCounter ctx;
  const Tree tree = build_decision_tree(problem, default_decision_tree_order(problem), ctx);

  CoalesceStats stats;
  const Tree dag = coalesce(tree, 1e-12, &stats);
  CHECK(dag.coalesced);
  CHECK(stats.nodes_before == 31);
  // 1 S + 2 T + 4 P survive; the 8 D nodes merge pairwise (D independent of
  // S given P); leaves dedupe to the 7 distinct utilities.
  CHECK(dag.chance_node_count() == 9);
  CHECK(dag.decision_node_count() == 2);
  CHECK(stats.nodes_after <= stats.nodes_before);
  CHECK(dag.information_sets.size() == 2);
}

TEST_CASE("coalesce leaves a tree with all-distinct leaf utilities unchanged") {
  ProblemDefinition def = fix::md_definition();
  def.observations[3] = {0, 1, 2};
  def.utility.scope = {0, 1, 2, 3};
  def.utility.entries.resize(16);
  for (std::size_t i = 0; i < def.utility.entries.size(); ++i) {
    def.utility.entries[i] = static_cast<double>(i + 1);
  }
  const ValidatedProblem problem = validate_problem(def);
  OpCounter ctx;
  const std::vector<int> order = {0, 1, 2, 3};  // causal order, T last
  const Tree tree = build_decision_tree(problem, order, ctx);
  CoalesceStats stats;
  coalesce(tree, 1e-12, &stats);
  CHECK(stats.nodes_after == stats.nodes_before);
}

TEST_CASE("identical sibling subtrees merge and preserve the rollback value") {
  // B's distribution does not depend on A, and utilities ignore A: the two
  // B subtrees under A are identical.
  ProblemDefinition def;
  def.name = "siblings";
  def.variables = {{"A", VariableKind::Chance, {"a", "~a"}},
                   {"B", VariableKind::Chance, {"b", "~b"}}};
  def.cpts = {{0, {}, {0.4, 0.6}}, {1, {}, {0.25, 0.75}}};
  def.utility.scope = {1};
  def.utility.entries = {8.0, 2.0};
  const ValidatedProblem problem = validate_problem(def);
  OpCounter ctx;
  const std::vector<int> order = {0, 1};
  const Tree tree = build_decision_tree(problem, order, ctx);

  CoalesceStats stats;
  const Tree dag = coalesce(tree, 1e-12, &stats);
  CHECK(stats.nodes_after < stats.nodes_before);

  OpCounter tree_ctx;
  OpCounter dag_ctx;
  const double tree_eu = rollback_decision_tree(tree, tree_ctx).expected_utility;
  const double dag_eu = rollback_decision_tree(dag, dag_ctx).expected_utility;
  CHECK(dag_eu == doctest::Approx(tree_eu).epsilon(1e-12));
  CHECK(dag_eu == doctest::Approx(0.25 * 8.0 + 0.75 * 2.0).epsilon(1e-12));
}

TEST_CASE("coalescence preserves every strategy's expected utility") {
  for (std::uint64_t seed = 21; seed <= 26; ++seed) {
    const ValidatedProblem problem = fix::random_problem(3, 1, seed);
    OpCounter ctx;
    const Tree tree = build_decision_tree(problem, default_decision_tree_order(problem), ctx);
    const Tree dag = coalesce(tree);
    for (const Strategy& strategy : enumerate_strategies(tree)) {
      const double on_tree = fix::tree_eu_under_strategy(tree, strategy, tree.root);
      const double on_dag = fix::tree_eu_under_strategy(dag, strategy, dag.root);
      CHECK(on_dag == doctest::Approx(on_tree).epsilon(1e-9));
    }
  }
}

TEST_CASE("all builders visit each variable once per path and fill the product frame") {
  for (std::uint64_t seed = 31; seed <= 34; ++seed) {
    const ValidatedProblem problem = fix::random_problem(3, 2, seed);
    OpCounter ctx;
    const Tree trees[] = {
        build_decision_tree(problem, default_decision_tree_order(problem), ctx),
        build_scenario_tree(problem, default_decision_tree_order(problem), ctx),
        build_game_tree(problem, ctx)};
    for (const Tree& tree : trees) {
      CHECK(tree.leaves.size() ==
            static_cast<std::size_t>(1) << static_cast<std::size_t>(problem.n_vars()));
      for (NodeId leaf : tree.leaves) {
        const auto path = tree.path_assignment(leaf);
        std::vector<int> seen;
        for (const auto& [var, value] : path) {
          CHECK(std::find(seen.begin(), seen.end(), var) == seen.end());
          seen.push_back(var);
        }
        CHECK(seen.size() == static_cast<std::size_t>(problem.n_vars()));
      }
      // Chance-node edge probabilities, when present, form a distribution.
      for (const TreeNode& node : tree.nodes) {
        if (node.kind != NodeKind::Chance || !node.edges.front().probability) continue;
        double sum = 0.0;
        for (const Edge& edge : node.edges) sum += *edge.probability;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_SUITE_END();
