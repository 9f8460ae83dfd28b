#ifndef DTSOLVE_SOLVERS_HPP
#define DTSOLVE_SOLVERS_HPP

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "dtsolve/builders.hpp"
#include "dtsolve/costcount.hpp"
#include "dtsolve/model.hpp"
#include "dtsolve/probability.hpp"

namespace dtsolve {

// Per-node pruning record: the value the node was replaced by and, for
// decision nodes, the chosen edge.
struct NodeTrace {
  NodeId node = kNoNode;
  double value = 0.0;
  int chosen_edge = -1;
};

// Per-information-set record of a game-tree solve: unnormalized member
// probabilities (member order), the score computed for each frame value, and
// the chosen value.
struct InfoSetTrace {
  int set = -1;
  std::vector<double> member_probabilities;
  std::vector<double> value_scores;
  int chosen = -1;
};

struct Solution {
  Strategy strategy;
  double expected_utility = 0.0;
  // Strategy-matrix only: every enumerated strategy with its expected
  // utility, in enumeration order.
  std::vector<std::pair<Strategy, double>> per_strategy_utilities;
  CostReport cost;
  // Domain of `strategy`: the information sets the solve ranged over.
  std::vector<InformationSet> information_sets;
  std::vector<NodeTrace> node_traces;
  std::vector<InfoSetTrace> set_traces;

  // "T[S:s]=t T[S:~s]=~t" style rendering, id order.
  std::vector<std::pair<std::string, std::string>> strategy_assignment(
      const std::vector<Variable>& variables) const;
};

// Joint distribution (representation phase), then the expected utility of
// every enumerated strategy, then argmax with first-maximum tie-breaking.
Solution solve_strategy_matrix(const ValidatedProblem& problem, OpCounter& ctx);

// Leaf-to-root recursion: chance nodes averaged out (b muls + b-1 adds),
// decision nodes folded back by maximization (b-1 cmps). Accepts coalesced
// DAGs; a shared node is pruned once and its value reused.
Solution rollback_decision_tree(const Tree& tree, OpCounter& ctx);

// Weighted utilities first (one mul per leaf), then leaf-to-root: chance
// nodes summed (b-1 adds), decision nodes maximized (b-1 cmps).
Solution prune_scenario_tree(const Tree& tree, OpCounter& ctx);

// Rollback generalized to information sets: per set, unnormalized member
// probabilities weight the member values for each decision value, the argmax
// value is applied to every member. Normalization is skipped. Chance nodes
// averaged as in decision trees.
Solution rollback_game_tree(const Tree& tree, OpCounter& ctx);

// Pruning generalized to information sets: per set and decision value, the
// sum of the weighted utilities at the respective edge ends; chance nodes
// summed.
Solution prune_game_tree(const Tree& tree, OpCounter& ctx);

// ---------------------------------------------------------------------------
// Method dispatch shared by the CLI, the bench harness and the tests.

enum class Method { Matrix, DtRollback, StPrune, GtRollback, GtPrune };

inline constexpr Method kAllMethods[] = {Method::Matrix, Method::DtRollback, Method::StPrune,
                                         Method::GtRollback, Method::GtPrune};

std::string_view method_name(Method method);
std::optional<Method> method_from_name(std::string_view name);

struct SolveOptions {
  std::vector<int> dt_order;  // empty: default order
  bool coalesce = false;
  double coalesce_tolerance = 1e-12;
};

struct MethodRun {
  Solution solution;
  std::optional<Tree> tree;  // absent for the strategy matrix
  CoalesceStats coalesce;
};

MethodRun run_method(const ValidatedProblem& problem, Method method,
                     const SolveOptions& options, OpCounter& ctx);

}  // namespace dtsolve

#endif  // DTSOLVE_SOLVERS_HPP
