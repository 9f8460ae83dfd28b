#ifndef DTSOLVE_BUILDERS_HPP
#define DTSOLVE_BUILDERS_HPP

#include <span>

#include "dtsolve/costcount.hpp"
#include "dtsolve/model.hpp"

namespace dtsolve {

// Order used when none is given: observed chance variables first (causal
// order among themselves), each decision variable immediately after its
// observations, remaining chance variables after all decisions in reverse
// causal order. Throws E_ORDER_VIOLATES_INFORMATION when the observation
// sets are not nested and no symmetric order exists.
std::vector<int> default_decision_tree_order(const ValidatedProblem& problem);

// True when the chance variables, in their order of appearance in `order`,
// do not form a topological order of CPT parenthood, i.e. the conditionals
// on the tree edges must be recomputed from the joint.
bool requires_bayesian_revision(const ValidatedProblem& problem, std::span<const int> order);

// Symmetric decision tree in the given variable order. Chance edges carry
// conditional probabilities (taken from the CPTs directly when no Bayesian
// revision is required, otherwise derived joint -> conditionals in the
// representation phase); decision nodes are singleton information sets.
Tree build_decision_tree(const ValidatedProblem& problem, std::span<const int> order,
                         OpCounter& ctx);

// Same shape as the decision tree but chance edges carry no probabilities;
// leaves carry path probabilities computed from the causal-order joint
// (representation phase).
Tree build_scenario_tree(const ValidatedProblem& problem, std::span<const int> order,
                         OpCounter& ctx);

// Chance variables in causal order, then decision variables in declaration
// order. Chance edges carry the CPT probabilities verbatim; decision nodes
// are grouped into information sets by the assignment of their observed
// variables (plus earlier decisions). Performs zero counted operations.
Tree build_game_tree(const ValidatedProblem& problem, OpCounter& ctx);

struct CoalesceStats {
  int nodes_before = 0;
  int nodes_after = 0;
  int merged_subtrees() const { return nodes_before - nodes_after; }
};

// Bottom-up structural hashing: merges subtrees whose kind, variable, edge
// values, edge probabilities (quantized to `tolerance` digits) and descendant
// payloads coincide. Decision nodes additionally hash their information-set
// id, so the strategy domain is preserved. The result is a rooted DAG whose
// shared nodes solvers prune once. Transform operations are not counted.
Tree coalesce(const Tree& tree, double tolerance = 1e-12, CoalesceStats* stats = nullptr);

}  // namespace dtsolve

#endif  // DTSOLVE_BUILDERS_HPP
