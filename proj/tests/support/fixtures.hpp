#ifndef DTSOLVE_TESTS_FIXTURES_HPP
#define DTSOLVE_TESTS_FIXTURES_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dtsolve/bench.hpp"
#include "dtsolve/builders.hpp"
#include "dtsolve/model.hpp"
#include "dtsolve/probability.hpp"
#include "dtsolve/solvers.hpp"

namespace dtsolve::testing {

inline std::string problem_path(const std::string& name) {
  return std::string(DTSOLVE_PROBLEM_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// The medical-diagnosis problem built programmatically; must equal the
// parsed bundled file.
inline ProblemDefinition md_definition() {
  ProblemDefinition def;
  def.name = "medical-diagnosis";
  def.variables = {
      {"D", VariableKind::Chance, {"d", "~d"}},
      {"P", VariableKind::Chance, {"p", "~p"}},
      {"S", VariableKind::Chance, {"s", "~s"}},
      {"T", VariableKind::Decision, {"t", "~t"}},
  };
  def.cpts = {
      {0, {}, {0.10, 0.90}},
      {1, {0}, {0.80, 0.20, 0.15, 0.85}},
      {2, {1}, {0.70, 0.30, 0.20, 0.80}},
  };
  def.utility.scope = {3, 1, 0};  // T, P, D
  def.utility.entries = {10, 6, 8, 4, 0, 2, 1, 10};
  def.observations = {{}, {}, {}, {2}};
  def.causal_order = {0, 1, 2};
  return def;
}

inline ValidatedProblem md_problem() { return validate_problem(md_definition()); }

// The joint re-expressed over (S, P, D): the event order of the strategy
// matrix, frozen as the reference fixture.
inline const std::vector<double>& md_event_probabilities() {
  static const std::vector<double> values = {0.0560, 0.0945, 0.0040, 0.1530,
                                             0.0240, 0.0405, 0.0160, 0.6120};
  return values;
}

inline std::map<std::string, std::string> strategy_map(const Solution& solution,
                                                       const std::vector<Variable>& variables) {
  std::map<std::string, std::string> out;
  for (const auto& [id, value] : solution.strategy_assignment(variables)) out[id] = value;
  return out;
}

// Expected utility of a fixed strategy evaluated directly on a decision tree
// (or coalesced DAG): chance nodes average, decision nodes follow the
// strategy. Independent of the solvers' pruning order.
inline double tree_eu_under_strategy(const Tree& tree, const Strategy& strategy, NodeId id) {
  const TreeNode& node = tree.nodes[id];
  switch (node.kind) {
    case NodeKind::Leaf:
      return node.utility;
    case NodeKind::Chance: {
      double sum = 0.0;
      for (const Edge& edge : node.edges) {
        sum += *edge.probability * tree_eu_under_strategy(tree, strategy, edge.child);
      }
      return sum;
    }
    case NodeKind::Decision: {
      const int choice = strategy.choices[node.info_set];
      for (const Edge& edge : node.edges) {
        if (edge.value == choice) return tree_eu_under_strategy(tree, strategy, edge.child);
      }
      return 0.0;
    }
  }
  return 0.0;
}

// Random nested observation pattern over m chance and n decision variables:
// observation sets grow along the declaration order so a symmetric decision
// tree always exists. Sets are capped at two chance variables to keep the
// strategy space enumerable for the brute-force oracle.
inline std::vector<std::vector<int>> random_nested_pattern(int m, int n, SplitMix64& rng) {
  constexpr std::size_t kMaxObserved = 2;
  std::vector<std::vector<int>> observed(n);
  for (int j = 0; j < n; ++j) {
    if (j > 0) observed[j] = observed[j - 1];
    for (int c = 0; c < m && observed[j].size() < kMaxObserved; ++c) {
      const bool already =
          std::find(observed[j].begin(), observed[j].end(), c) != observed[j].end();
      if (!already && rng.uniform01() < 0.35) observed[j].push_back(c);
    }
  }
  return observed;
}

inline ValidatedProblem random_problem(int m, int n, std::uint64_t seed) {
  SplitMix64 pattern_rng(seed ^ 0x5bd1e995u);
  BenchConfig cfg;
  cfg.chance_vars = m;
  cfg.decision_vars = n;
  cfg.observed = random_nested_pattern(m, n, pattern_rng);
  cfg.seed = seed;
  return generate_problem(cfg);
}

}  // namespace dtsolve::testing

#endif  // DTSOLVE_TESTS_FIXTURES_HPP
