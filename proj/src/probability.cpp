#include "dtsolve/probability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dtsolve {

namespace {
constexpr double kZeroMarginal = 1e-12;
}

double JointTable::at_assignment(std::span<const int> assignment) const {
  std::int64_t code = 0;
  for (std::size_t i = 0; i < scope.size(); ++i) {
    code = code * card[i] + assignment[scope[i]];
  }
  return entries[code];
}

JointTable joint_distribution(const ValidatedProblem& problem, OpCounter& ctx, Phase phase) {
  JointTable joint;
  joint.scope = problem.causal_order();
  for (int v : joint.scope) joint.card.push_back(static_cast<int>(problem.var(v).frame.size()));
  joint.entries.assign(frame_product(joint.scope, problem.variables()), 0.0);

  const int depth_max = static_cast<int>(joint.scope.size());
  if (depth_max == 0) {
    joint.entries = {1.0};
    return joint;
  }

  std::vector<int> assignment(problem.n_vars(), -1);
  // Incremental products down the causal-order probability tree: the root
  // level copies the prior, every deeper factor costs one multiplication.
  auto descend = [&](auto&& self, int depth, std::int64_t code, double partial) -> void {
    const int v = joint.scope[depth];
    const Cpt& cpt = problem.cpt_for(v);
    const std::int64_t row =
        assignment_code(cpt.parents, assignment, problem.variables()) * joint.card[depth];
    for (int value = 0; value < joint.card[depth]; ++value) {
      const double p = cpt.rows[row + value];
      double product;
      if (depth == 0) {
        product = p;
      } else {
        product = partial * p;
        ctx.record(OpKind::Mul, phase);
      }
      assignment[v] = value;
      const std::int64_t child_code = code * joint.card[depth] + value;
      if (depth + 1 == depth_max) {
        joint.entries[child_code] = product;
      } else {
        self(self, depth + 1, child_code, product);
      }
    }
    assignment[v] = -1;
  };
  descend(descend, 0, 0, 1.0);
  return joint;
}

std::vector<Cpt> conditionals_from_joint(const JointTable& joint,
                                         std::span<const int> target_order, OpCounter& ctx,
                                         Phase phase) {
  const int len = static_cast<int>(joint.scope.size());
  {
    std::vector<int> a(joint.scope.begin(), joint.scope.end());
    std::vector<int> b(target_order.begin(), target_order.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      fail(Errc::UnknownVariable, "target order must be a permutation of the joint scope");
    }
  }

  std::vector<int> card(len);
  std::vector<int> scope_pos(len);  // position of target_order[i] in joint.scope
  for (int i = 0; i < len; ++i) {
    const auto it = std::find(joint.scope.begin(), joint.scope.end(), target_order[i]);
    scope_pos[i] = static_cast<int>(it - joint.scope.begin());
    card[i] = joint.card[scope_pos[i]];
  }

  // Re-express the joint in target order (a permutation, no arithmetic).
  std::vector<double> reordered(joint.entries.size());
  {
    std::vector<int> tvals(len);
    for (std::int64_t code = 0; code < static_cast<std::int64_t>(joint.entries.size());
         ++code) {
      std::int64_t rem = code;
      for (int i = len - 1; i >= 0; --i) {
        tvals[i] = static_cast<int>(rem % card[i]);
        rem /= card[i];
      }
      std::int64_t source = 0;
      for (int s = 0; s < len; ++s) {
        int value = 0;
        for (int i = 0; i < len; ++i) {
          if (scope_pos[i] == s) {
            value = tvals[i];
            break;
          }
        }
        source = source * joint.card[s] + value;
      }
      reordered[code] = joint.entries[source];
    }
  }

  // Prefix marginals bottom-up; marginal over the first k variables is
  // derived from the one over k+1 by pairwise additions.
  std::vector<std::vector<double>> marginals(len + 1);
  marginals[len] = reordered;
  for (int k = len - 1; k >= 1; --k) {
    const int child_card = card[k];
    const std::int64_t size = marginals[k + 1].size() / child_card;
    marginals[k].assign(size, 0.0);
    for (std::int64_t i = 0; i < size; ++i) {
      double sum = marginals[k + 1][i * child_card];
      for (int v = 1; v < child_card; ++v) {
        sum += marginals[k + 1][i * child_card + v];
        ctx.record(OpKind::Add, phase);
      }
      marginals[k][i] = sum;
    }
  }

  // One division per conditional entry; the first variable's distribution is
  // its marginal and needs none.
  std::vector<Cpt> chain;
  for (int i = 0; i < len; ++i) {
    Cpt cpt;
    cpt.child = target_order[i];
    cpt.parents.assign(target_order.begin(), target_order.begin() + i);
    if (i == 0) {
      cpt.rows = marginals[1];
    } else {
      const std::int64_t rows = marginals[i].size();
      cpt.rows.assign(marginals[i + 1].size(), 0.0);
      for (std::int64_t r = 0; r < rows; ++r) {
        const double denom = marginals[i][r];
        if (denom < kZeroMarginal) {
          fail(Errc::ZeroMarginal, "conditioning event has probability below 1e-12");
        }
        for (int v = 0; v < card[i]; ++v) {
          cpt.rows[r * card[i] + v] = marginals[i + 1][r * card[i] + v] / denom;
          ctx.record(OpKind::Div, phase);
        }
      }
    }
    chain.push_back(std::move(cpt));
  }
  return chain;
}

PathProbabilityTable path_probabilities(const Tree& tree, const ValidatedProblem& problem,
                                        OpCounter& ctx, Phase phase) {
  PathProbabilityTable table;
  table.values.assign(tree.nodes.size(), std::numeric_limits<double>::quiet_NaN());

  if (tree.kind == TreeKind::ScenarioTree) {
    // No probabilities on edges: price each path from the causal-order joint.
    const JointTable joint = joint_distribution(problem, ctx, phase);
    std::vector<int> assignment(problem.n_vars(), -1);
    auto walk = [&](auto&& self, NodeId id) -> void {
      const TreeNode& node = tree.nodes[id];
      if (node.kind == NodeKind::Leaf) {
        table.values[id] = joint.at_assignment(assignment);
        return;
      }
      for (const Edge& edge : node.edges) {
        assignment[node.variable] = edge.value;
        self(self, edge.child);
      }
      assignment[node.variable] = -1;
    };
    walk(walk, tree.root);
    return table;
  }

  // Incremental products over chance edges; decision edges contribute 1.
  auto walk = [&](auto&& self, NodeId id, double product, int chance_depth) -> void {
    const TreeNode& node = tree.nodes[id];
    if (node.kind == NodeKind::Leaf) {
      table.values[id] = product;
      return;
    }
    for (const Edge& edge : node.edges) {
      double next = product;
      int next_depth = chance_depth;
      if (node.kind == NodeKind::Chance) {
        if (!edge.probability) {
          fail(Errc::MissingProbability,
               "chance edge lacks a probability; path probabilities need them");
        }
        if (chance_depth == 0) {
          next = *edge.probability;
        } else {
          next = product * *edge.probability;
          ctx.record(OpKind::Mul, phase);
        }
        next_depth = chance_depth + 1;
      }
      self(self, edge.child, next, next_depth);
    }
  };
  walk(walk, tree.root, 1.0, 0);
  return table;
}

void weighted_utilities(Tree& tree, const PathProbabilityTable& pi, OpCounter& ctx,
                        Phase phase) {
  for (NodeId leaf : tree.leaves) {
    TreeNode& node = tree.nodes[leaf];
    node.weighted_utility = pi.at(leaf) * node.utility;
    ctx.record(OpKind::Mul, phase);
  }
}

double strategy_expected_utility(const Strategy& strategy,
                                 const std::vector<InformationSet>& sets,
                                 const JointTable& joint, const ValidatedProblem& problem,
                                 OpCounter& ctx, Phase phase) {
  // Ordinal base of each decision variable's block in the canonical set list.
  const auto& decisions = problem.decision_order();
  std::vector<std::int64_t> base(decisions.size() + 1, 0);
  for (std::size_t j = 0; j < decisions.size(); ++j) {
    base[j + 1] = base[j] + frame_product(problem.key_vars(static_cast<int>(j)),
                                          problem.variables());
  }
  if (!sets.empty() && static_cast<std::int64_t>(sets.size()) != base[decisions.size()]) {
    fail(Errc::SetNotReady, "strategy domain does not match the problem's information sets");
  }

  std::vector<int> assignment(problem.n_vars(), -1);
  double total = 0.0;
  const std::int64_t events = static_cast<std::int64_t>(joint.entries.size());
  for (std::int64_t event = 0; event < events; ++event) {
    decode_assignment(event, joint.scope, problem.variables(), assignment);
    for (std::size_t j = 0; j < decisions.size(); ++j) {
      const std::int64_t key_code =
          assignment_code(problem.key_vars(static_cast<int>(j)), assignment,
                          problem.variables());
      assignment[decisions[j]] = strategy.choices[base[j] + key_code];
    }
    const double v = utility_at(problem.def().utility, assignment, problem.variables());
    total += joint.entries[event] * v;
    ctx.record(OpKind::Mul, phase);
    if (event > 0) ctx.record(OpKind::Add, phase);
  }
  return total;
}

}  // namespace dtsolve
