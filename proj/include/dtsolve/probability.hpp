#ifndef DTSOLVE_PROBABILITY_HPP
#define DTSOLVE_PROBABILITY_HPP

#include <span>
#include <vector>

#include "dtsolve/costcount.hpp"
#include "dtsolve/model.hpp"

namespace dtsolve {

// Dense joint distribution over chance variables, stored in depth-first frame
// order of `scope` (first variable most significant).
struct JointTable {
  std::vector<int> scope;
  std::vector<int> card;  // frame sizes, aligned with scope
  std::vector<double> entries;

  double at_code(std::int64_t code) const { return entries[code]; }
  // Probability of the scope projection of a full assignment.
  double at_assignment(std::span<const int> assignment) const;
};

// Path probability per leaf node id; NaN for non-leaves.
struct PathProbabilityTable {
  std::vector<double> values;

  double at(NodeId leaf) const { return values[leaf]; }
};

// Joint from the CPT chain by incremental products down the causal-order
// tree: depth-1 edges copy their probability, every deeper factor costs one
// multiplication. For m binary chance variables: 2^(m+1) - 4 muls.
JointTable joint_distribution(const ValidatedProblem& problem, OpCounter& ctx,
                              Phase phase = Phase::Representation);

// Pr(V1), Pr(V2|V1), ... for `target_order` (a permutation of the joint
// scope): marginals by pairwise additions bottom-up, one division per
// conditional entry. Throws E_ZERO_MARGINAL when a conditioning event has
// probability below 1e-12.
std::vector<Cpt> conditionals_from_joint(const JointTable& joint,
                                         std::span<const int> target_order, OpCounter& ctx,
                                         Phase phase = Phase::Representation);

// pi(leaf) = product of the chance-edge conditional probabilities along the
// root-to-leaf path; decision edges contribute factor 1. Scenario trees carry
// no edge probabilities, so their paths are priced from the causal-order
// joint instead; either route costs the same (12 muls for the bundled
// medical-diagnosis trees).
PathProbabilityTable path_probabilities(const Tree& tree, const ValidatedProblem& problem,
                                        OpCounter& ctx, Phase phase);

// Sets leaf.weighted_utility = pi(leaf) * v(leaf); one mul per leaf.
void weighted_utilities(Tree& tree, const PathProbabilityTable& pi, OpCounter& ctx,
                        Phase phase = Phase::Solution);

// Expected utility of one strategy: sum over chance events of
// Pr(event) * v(acts dictated by the strategy, event). For 2^m events:
// 2^m muls + (2^m - 1) adds.
double strategy_expected_utility(const Strategy& strategy,
                                 const std::vector<InformationSet>& sets,
                                 const JointTable& joint, const ValidatedProblem& problem,
                                 OpCounter& ctx, Phase phase = Phase::Solution);

}  // namespace dtsolve

#endif  // DTSOLVE_PROBABILITY_HPP
