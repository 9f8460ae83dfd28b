#include "dtsolve/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace dtsolve {

std::vector<std::pair<std::string, std::string>> Solution::strategy_assignment(
    const std::vector<Variable>& variables) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < information_sets.size(); ++i) {
    const InformationSet& set = information_sets[i];
    out.emplace_back(set.id, variables[set.variable].frame[strategy.choices[i]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strategy matrix.

Solution solve_strategy_matrix(const ValidatedProblem& problem, OpCounter& ctx) {
  Solution sol;
  const JointTable joint = joint_distribution(problem, ctx, Phase::Representation);
  sol.information_sets = canonical_information_sets(problem);
  const std::vector<Strategy> strategies =
      enumerate_strategies(sol.information_sets, problem.variables());

  // Flat-index tables so the strategy sweep stays a tight loop; the counted
  // operations are identical to evaluating strategy_expected_utility per row.
  const auto& decisions = problem.decision_order();
  const int n_dec = static_cast<int>(decisions.size());
  const std::int64_t events = static_cast<std::int64_t>(joint.entries.size());

  std::vector<std::int64_t> base(n_dec + 1, 0);
  std::vector<std::int64_t> acts_radix(n_dec, 1);  // product of earlier decision cards
  std::vector<int> dec_card(n_dec, 0);
  for (int j = 0; j < n_dec; ++j) {
    base[j + 1] = base[j] + frame_product(problem.key_vars(j), problem.variables());
    dec_card[j] = static_cast<int>(problem.var(decisions[j]).frame.size());
    for (int i = 0; i < j; ++i) acts_radix[j] *= dec_card[i];
  }

  // Utility index strides per scope variable.
  const UtilityTable& utility = problem.def().utility;
  std::vector<std::int64_t> scope_stride(utility.scope.size(), 1);
  for (int i = static_cast<int>(utility.scope.size()) - 2; i >= 0; --i) {
    scope_stride[i] =
        scope_stride[i + 1] *
        static_cast<std::int64_t>(problem.var(utility.scope[i + 1]).frame.size());
  }
  std::vector<std::int64_t> dec_stride(n_dec, 0);
  for (int j = 0; j < n_dec; ++j) {
    for (std::size_t s = 0; s < utility.scope.size(); ++s) {
      if (utility.scope[s] == decisions[j]) dec_stride[j] = scope_stride[s];
    }
  }

  // Per event: probability, chance part of the utility index, and the
  // chance-observation part of each decision's key code.
  std::vector<std::int64_t> u_chance(events, 0);
  std::vector<std::vector<std::int64_t>> obs_part(n_dec);
  for (auto& column : obs_part) column.assign(events, 0);
  {
    std::vector<int> assignment(problem.n_vars(), -1);
    for (std::int64_t e = 0; e < events; ++e) {
      decode_assignment(e, joint.scope, problem.variables(), assignment);
      std::int64_t code = 0;
      for (std::size_t s = 0; s < utility.scope.size(); ++s) {
        const int v = utility.scope[s];
        code += (problem.is_chance(v) ? assignment[v] : 0) * scope_stride[s];
      }
      u_chance[e] = code;
      for (int j = 0; j < n_dec; ++j) {
        std::int64_t obs_code = 0;
        for (int kv : problem.key_vars(j)) {
          if (!problem.is_chance(kv)) break;  // chance key vars rank first
          obs_code = obs_code * static_cast<std::int64_t>(problem.var(kv).frame.size()) +
                     assignment[kv];
        }
        obs_part[j][e] = obs_code;
      }
    }
  }

  sol.per_strategy_utilities.reserve(strategies.size());
  double best = 0.0;
  std::size_t chosen = 0;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    const Strategy& strategy = strategies[i];
    double total = 0.0;
    for (std::int64_t e = 0; e < events; ++e) {
      std::int64_t ucode = u_chance[e];
      std::int64_t acts_code = 0;
      for (int j = 0; j < n_dec; ++j) {
        const std::int64_t key = obs_part[j][e] * acts_radix[j] + acts_code;
        const int act = strategy.choices[base[j] + key];
        acts_code = acts_code * dec_card[j] + act;
        ucode += act * dec_stride[j];
      }
      total += joint.entries[e] * utility.entries[ucode];
    }
    ctx.record(OpKind::Mul, Phase::Solution, events);
    if (events > 1) ctx.record(OpKind::Add, Phase::Solution, events - 1);
    sol.per_strategy_utilities.emplace_back(strategy, total);
    if (i == 0) {
      best = total;
    } else {
      ctx.record(OpKind::Cmp, Phase::Solution);
      if (total > best) {
        best = total;
        chosen = i;
      }
    }
  }
  sol.strategy = strategies[chosen];
  sol.expected_utility = best;
  sol.cost = ctx.report();
  return sol;
}

// ---------------------------------------------------------------------------
// Decision-tree rollback and scenario-tree pruning.

Solution rollback_decision_tree(const Tree& tree, OpCounter& ctx) {
  Solution sol;
  sol.information_sets = tree.information_sets;
  sol.strategy.choices.assign(tree.information_sets.size(), 0);

  std::vector<char> done(tree.nodes.size(), 0);
  std::vector<double> value(tree.nodes.size(), 0.0);
  auto prune = [&](auto&& self, NodeId id) -> double {
    if (done[id]) return value[id];  // shared node of a coalesced DAG: pruned once
    const TreeNode& node = tree.nodes[id];
    double result = 0.0;
    switch (node.kind) {
      case NodeKind::Leaf:
        result = node.utility;
        break;
      case NodeKind::Chance: {
        bool first = true;
        for (const Edge& edge : node.edges) {
          if (!edge.probability) {
            fail(Errc::MissingProbability, "chance edge without probability in rollback");
          }
          const double term = *edge.probability * self(self, edge.child);
          ctx.record(OpKind::Mul, Phase::Solution);
          if (first) {
            result = term;
            first = false;
          } else {
            result += term;
            ctx.record(OpKind::Add, Phase::Solution);
          }
        }
        sol.node_traces.push_back({id, result, -1});
        break;
      }
      case NodeKind::Decision: {
        int chosen = 0;
        result = self(self, node.edges[0].child);
        for (std::size_t e = 1; e < node.edges.size(); ++e) {
          const double candidate = self(self, node.edges[e].child);
          ctx.record(OpKind::Cmp, Phase::Solution);
          if (candidate > result) {
            result = candidate;
            chosen = static_cast<int>(e);
          }
        }
        sol.strategy.choices[node.info_set] = node.edges[chosen].value;
        sol.node_traces.push_back({id, result, chosen});
        break;
      }
    }
    done[id] = 1;
    value[id] = result;
    return result;
  };
  sol.expected_utility = prune(prune, tree.root);
  sol.cost = ctx.report();
  return sol;
}

Solution prune_scenario_tree(const Tree& tree, OpCounter& ctx) {
  Solution sol;
  sol.information_sets = tree.information_sets;
  sol.strategy.choices.assign(tree.information_sets.size(), 0);

  // Weighted utilities first; pruning then reads them in place.
  std::vector<double> value(tree.nodes.size(), 0.0);
  for (NodeId leaf : tree.leaves) {
    const TreeNode& node = tree.nodes[leaf];
    if (!node.path_probability) {
      fail(Errc::MissingPathProbability, "scenario-tree leaf lacks a path probability");
    }
    value[leaf] = *node.path_probability * node.utility;
    ctx.record(OpKind::Mul, Phase::Solution);
  }

  auto prune = [&](auto&& self, NodeId id) -> double {
    const TreeNode& node = tree.nodes[id];
    if (node.kind == NodeKind::Leaf) return value[id];
    double result = 0.0;
    if (node.kind == NodeKind::Chance) {
      bool first = true;
      for (const Edge& edge : node.edges) {
        const double term = self(self, edge.child);
        if (first) {
          result = term;
          first = false;
        } else {
          result += term;
          ctx.record(OpKind::Add, Phase::Solution);
        }
      }
      sol.node_traces.push_back({id, result, -1});
    } else {
      int chosen = 0;
      result = self(self, node.edges[0].child);
      for (std::size_t e = 1; e < node.edges.size(); ++e) {
        const double candidate = self(self, node.edges[e].child);
        ctx.record(OpKind::Cmp, Phase::Solution);
        if (candidate > result) {
          result = candidate;
          chosen = static_cast<int>(e);
        }
      }
      sol.strategy.choices[node.info_set] = node.edges[chosen].value;
      sol.node_traces.push_back({id, result, chosen});
    }
    value[id] = result;
    return result;
  };
  sol.expected_utility = prune(prune, tree.root);
  sol.cost = ctx.report();
  return sol;
}

// ---------------------------------------------------------------------------
// Game trees.

namespace {

// Incremental products of chance-edge probabilities from the root: the first
// chance edge on a path copies, every deeper one costs one multiplication.
std::vector<double> chance_prefix_products(const Tree& tree, OpCounter& ctx) {
  std::vector<double> prefix(tree.nodes.size(), 1.0);
  auto walk = [&](auto&& self, NodeId id, double product, int chance_depth) -> void {
    prefix[id] = product;
    const TreeNode& node = tree.nodes[id];
    for (const Edge& edge : node.edges) {
      double next = product;
      int next_depth = chance_depth;
      if (node.kind == NodeKind::Chance) {
        if (!edge.probability) {
          fail(Errc::MissingProbability, "game-tree chance edge without probability");
        }
        if (chance_depth == 0) {
          next = *edge.probability;
        } else {
          next = product * *edge.probability;
          ctx.record(OpKind::Mul, Phase::Solution);
        }
        next_depth = chance_depth + 1;
      }
      self(self, edge.child, next, next_depth);
    }
  };
  walk(walk, tree.root, 1.0, 0);
  return prefix;
}

std::vector<int> node_depths(const Tree& tree) {
  std::vector<int> depth(tree.nodes.size(), 0);
  auto walk = [&](auto&& self, NodeId id, int d) -> void {
    depth[id] = d;
    for (const Edge& edge : tree.nodes[id].edges) self(self, edge.child, d + 1);
  };
  walk(walk, tree.root, 0);
  return depth;
}

// Information sets ordered so that sets nearer the leaves are pruned first.
std::vector<int> leafward_set_order(const Tree& tree) {
  const std::vector<int> depth = node_depths(tree);
  std::vector<int> order(tree.information_sets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::vector<int> set_depth(order.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (NodeId member : tree.information_sets[i].members) {
      set_depth[i] = std::max(set_depth[i], depth[member]);
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return set_depth[a] > set_depth[b]; });
  return order;
}

enum class GameMode { Rollback, Pruning };

Solution solve_game_tree(const Tree& tree, OpCounter& ctx, GameMode mode) {
  Solution sol;
  sol.information_sets = tree.information_sets;
  sol.strategy.choices.assign(tree.information_sets.size(), 0);

  const std::vector<double> prefix = chance_prefix_products(tree, ctx);

  std::vector<char> done(tree.nodes.size(), 0);
  std::vector<double> value(tree.nodes.size(), 0.0);

  if (mode == GameMode::Pruning) {
    // Path probabilities are the prefix products at the leaves; weighted
    // utilities are computed for every leaf up front.
    for (NodeId leaf : tree.leaves) {
      value[leaf] = prefix[leaf] * tree.nodes[leaf].utility;
      ctx.record(OpKind::Mul, Phase::Solution);
      done[leaf] = 1;
    }
  } else {
    for (NodeId leaf : tree.leaves) {
      value[leaf] = tree.nodes[leaf].utility;
      done[leaf] = 1;
    }
  }

  // Resolves chance subtrees between pruned layers; an unpruned decision
  // node here means the processing order was wrong.
  auto resolve = [&](auto&& self, NodeId id) -> double {
    if (done[id]) return value[id];
    const TreeNode& node = tree.nodes[id];
    if (node.kind == NodeKind::Decision) {
      fail(Errc::SetNotReady, "information set processed before its members' subtrees");
    }
    double result = 0.0;
    bool first = true;
    for (const Edge& edge : node.edges) {
      double term = self(self, edge.child);
      if (mode == GameMode::Rollback) {
        term = *edge.probability * term;
        ctx.record(OpKind::Mul, Phase::Solution);
      }
      if (first) {
        result = term;
        first = false;
      } else {
        result += term;
        ctx.record(OpKind::Add, Phase::Solution);
      }
    }
    sol.node_traces.push_back({id, result, -1});
    done[id] = 1;
    value[id] = result;
    return result;
  };

  for (int s : leafward_set_order(tree)) {
    const InformationSet& set = sol.information_sets[s];
    const auto& members = set.members;
    const int card = static_cast<int>(tree.variables[set.variable].frame.size());

    InfoSetTrace trace;
    trace.set = s;
    for (NodeId member : members) trace.member_probabilities.push_back(prefix[member]);

    // Score each decision value across the whole set.
    for (int v = 0; v < card; ++v) {
      double score = 0.0;
      bool first = true;
      for (NodeId member : members) {
        const NodeId end = tree.nodes[member].edges[v].child;
        double term = resolve(resolve, end);
        if (mode == GameMode::Rollback) {
          term = prefix[member] * term;
          ctx.record(OpKind::Mul, Phase::Solution);
        }
        if (first) {
          score = term;
          first = false;
        } else {
          score += term;
          ctx.record(OpKind::Add, Phase::Solution);
        }
      }
      trace.value_scores.push_back(score);
    }
    int chosen = 0;
    for (int v = 1; v < card; ++v) {
      ctx.record(OpKind::Cmp, Phase::Solution);
      if (trace.value_scores[v] > trace.value_scores[chosen]) chosen = v;
    }
    trace.chosen = chosen;
    sol.strategy.choices[s] = tree.nodes[members.front()].edges[chosen].value;

    // Replace each member by the value at the end of its chosen edge.
    for (NodeId member : members) {
      const NodeId end = tree.nodes[member].edges[chosen].child;
      value[member] = resolve(resolve, end);
      done[member] = 1;
      sol.node_traces.push_back({member, value[member], chosen});
    }
    sol.set_traces.push_back(std::move(trace));
  }

  sol.expected_utility = resolve(resolve, tree.root);
  sol.cost = ctx.report();
  return sol;
}

}  // namespace

Solution rollback_game_tree(const Tree& tree, OpCounter& ctx) {
  return solve_game_tree(tree, ctx, GameMode::Rollback);
}

Solution prune_game_tree(const Tree& tree, OpCounter& ctx) {
  return solve_game_tree(tree, ctx, GameMode::Pruning);
}

// ---------------------------------------------------------------------------
// Dispatch.

std::string_view method_name(Method method) {
  switch (method) {
    case Method::Matrix: return "matrix";
    case Method::DtRollback: return "dt-rollback";
    case Method::StPrune: return "st-prune";
    case Method::GtRollback: return "gt-rollback";
    case Method::GtPrune: return "gt-prune";
  }
  return "";
}

std::optional<Method> method_from_name(std::string_view name) {
  for (Method method : kAllMethods) {
    if (method_name(method) == name) return method;
  }
  return std::nullopt;
}

MethodRun run_method(const ValidatedProblem& problem, Method method,
                     const SolveOptions& options, OpCounter& ctx) {
  MethodRun run;
  const auto order = [&]() -> std::vector<int> {
    return options.dt_order.empty() ? default_decision_tree_order(problem) : options.dt_order;
  };
  switch (method) {
    case Method::Matrix:
      run.solution = solve_strategy_matrix(problem, ctx);
      break;
    case Method::DtRollback: {
      Tree tree = build_decision_tree(problem, order(), ctx);
      if (options.coalesce) {
        tree = coalesce(tree, options.coalesce_tolerance, &run.coalesce);
      }
      run.solution = rollback_decision_tree(tree, ctx);
      run.tree = std::move(tree);
      break;
    }
    case Method::StPrune: {
      Tree tree = build_scenario_tree(problem, order(), ctx);
      run.solution = prune_scenario_tree(tree, ctx);
      run.tree = std::move(tree);
      break;
    }
    case Method::GtRollback: {
      Tree tree = build_game_tree(problem, ctx);
      run.solution = rollback_game_tree(tree, ctx);
      run.tree = std::move(tree);
      break;
    }
    case Method::GtPrune: {
      Tree tree = build_game_tree(problem, ctx);
      run.solution = prune_game_tree(tree, ctx);
      run.tree = std::move(tree);
      break;
    }
  }
  return run;
}

}  // namespace dtsolve
