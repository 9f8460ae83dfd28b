#include "dtsolve/builders.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "dtsolve/probability.hpp"

namespace dtsolve {

namespace {

std::vector<int> chance_prefix(const ValidatedProblem& problem, std::span<const int> order) {
  std::vector<int> chance;
  for (int v : order) {
    if (problem.is_chance(v)) chance.push_back(v);
  }
  return chance;
}

void check_order(const ValidatedProblem& problem, std::span<const int> order) {
  const int n = problem.n_vars();
  std::vector<int> position(n, -1);
  if (static_cast<int>(order.size()) != n) {
    fail(Errc::OrderViolatesInformation, "order must list every variable exactly once");
  }
  for (int i = 0; i < n; ++i) {
    const int v = order[i];
    if (v < 0 || v >= n || position[v] != -1) {
      fail(Errc::OrderViolatesInformation, "order must list every variable exactly once");
    }
    position[v] = i;
  }
  // Decisions are made in declaration order.
  const auto& decisions = problem.decision_order();
  for (std::size_t j = 1; j < decisions.size(); ++j) {
    if (position[decisions[j - 1]] > position[decisions[j]]) {
      fail(Errc::OrderViolatesInformation,
           "decision variables must appear in declaration order");
    }
  }
  // A chance variable precedes a decision exactly when the decision
  // observes it.
  for (int d : decisions) {
    for (int v = 0; v < n; ++v) {
      if (!problem.is_chance(v)) continue;
      const auto& obs = problem.observed(d);
      const bool observed = std::find(obs.begin(), obs.end(), v) != obs.end();
      const bool before = position[v] < position[d];
      if (observed && !before) {
        fail(Errc::OrderViolatesInformation,
             "'" + problem.var(d).name + "' observes '" + problem.var(v).name +
                 "' which is placed after it");
      }
      if (!observed && before) {
        fail(Errc::OrderViolatesInformation,
             "'" + problem.var(v).name + "' precedes '" + problem.var(d).name +
                 "' but is not observed by it");
      }
    }
    for (int o : problem.observed(d)) {
      if (problem.is_decision(o) && position[o] > position[d]) {
        fail(Errc::OrderViolatesInformation,
             "'" + problem.var(d).name + "' observes '" + problem.var(o).name +
                 "' which is placed after it");
      }
    }
  }
}

// Shared symmetric-tree construction. `edge_probability` is null for
// scenario trees; otherwise it returns the conditional for (variable, value)
// given the current path assignment.
class ShapeBuilder {
 public:
  ShapeBuilder(const ValidatedProblem& problem, std::span<const int> order, TreeKind kind,
               std::function<double(int, int, std::span<const int>)> edge_probability)
      : problem_(problem),
        order_(order),
        edge_probability_(std::move(edge_probability)) {
    tree_.kind = kind;
    tree_.variables = problem.variables();
    assignment_.assign(problem.n_vars(), -1);
    decision_position_.assign(problem.n_vars(), -1);
    for (std::size_t j = 0; j < problem.decision_order().size(); ++j) {
      decision_position_[problem.decision_order()[j]] = static_cast<int>(j);
    }
  }

  Tree build() {
    tree_.root = grow(0);
    materialize_information_sets();
    return std::move(tree_);
  }

 private:
  NodeId grow(int depth) {
    const NodeId id = static_cast<NodeId>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    if (depth == static_cast<int>(order_.size())) {
      tree_.nodes[id].kind = NodeKind::Leaf;
      tree_.nodes[id].utility =
          utility_at(problem_.def().utility, assignment_, problem_.variables());
      tree_.leaves.push_back(id);
      return id;
    }
    const int v = order_[depth];
    const bool chance = problem_.is_chance(v);
    tree_.nodes[id].kind = chance ? NodeKind::Chance : NodeKind::Decision;
    tree_.nodes[id].variable = v;
    if (!chance) {
      const int j = decision_position_[v];
      const std::int64_t key_code =
          assignment_code(problem_.key_vars(j), assignment_, problem_.variables());
      set_members_[{j, key_code}].push_back(id);
    }
    const int card = static_cast<int>(problem_.var(v).frame.size());
    for (int value = 0; value < card; ++value) {
      Edge edge;
      edge.value = value;
      if (chance && edge_probability_) {
        edge.probability = edge_probability_(v, value, assignment_);
      }
      assignment_[v] = value;
      edge.child = grow(depth + 1);
      assignment_[v] = -1;
      tree_.nodes[edge.child].parent = id;
      tree_.nodes[edge.child].parent_edge = value;
      tree_.nodes[id].edges.push_back(edge);
    }
    return id;
  }

  void materialize_information_sets() {
    std::vector<int> assignment(problem_.n_vars(), -1);
    for (const auto& [group, members] : set_members_) {
      const auto [j, key_code] = group;
      const int d = problem_.decision_order()[j];
      const std::vector<int>& key_vars = problem_.key_vars(j);
      decode_assignment(key_code, key_vars, problem_.variables(), assignment);
      InformationSet set;
      set.variable = d;
      for (int kv : key_vars) set.key.emplace_back(kv, assignment[kv]);
      set.id = information_set_id(problem_, d, set.key);
      set.members = members;
      const int ordinal = static_cast<int>(tree_.information_sets.size());
      for (NodeId member : members) tree_.nodes[member].info_set = ordinal;
      tree_.information_sets.push_back(std::move(set));
    }
  }

  const ValidatedProblem& problem_;
  std::span<const int> order_;
  std::function<double(int, int, std::span<const int>)> edge_probability_;
  Tree tree_;
  std::vector<int> assignment_;
  std::vector<int> decision_position_;
  // (decision position, key code) -> members in depth-first encounter order.
  // std::map iteration yields the canonical information-set order.
  std::map<std::pair<int, std::int64_t>, std::vector<NodeId>> set_members_;
};

}  // namespace

std::vector<int> default_decision_tree_order(const ValidatedProblem& problem) {
  std::vector<int> order;
  std::vector<char> placed(problem.n_vars(), 0);
  for (int j = 0; j < static_cast<int>(problem.decision_order().size()); ++j) {
    const int d = problem.decision_order()[j];
    // Everything already placed must be observed by this decision, or no
    // symmetric order exists.
    for (int v : order) {
      if (!problem.is_chance(v)) continue;
      const auto& obs = problem.observed(d);
      if (std::find(obs.begin(), obs.end(), v) == obs.end()) {
        fail(Errc::OrderViolatesInformation,
             "observation sets are not nested: no decision-tree order exists");
      }
    }
    for (int v : problem.causal_order()) {
      const auto& obs = problem.observed(d);
      if (!placed[v] && std::find(obs.begin(), obs.end(), v) != obs.end()) {
        order.push_back(v);
        placed[v] = 1;
      }
    }
    order.push_back(d);
    placed[d] = 1;
  }
  // Unobserved chance variables resolve after all decisions, in reverse
  // causal order (effects before their causes, matching the diagnostic
  // sequencing of the bundled problem).
  const auto& causal = problem.causal_order();
  for (auto it = causal.rbegin(); it != causal.rend(); ++it) {
    if (!placed[*it]) {
      order.push_back(*it);
      placed[*it] = 1;
    }
  }
  check_order(problem, order);
  return order;
}

bool requires_bayesian_revision(const ValidatedProblem& problem, std::span<const int> order) {
  const std::vector<int> chance = chance_prefix(problem, order);
  std::vector<char> seen(problem.n_vars(), 0);
  for (int v : chance) {
    for (int p : problem.cpt_for(v).parents) {
      if (!seen[p]) return true;
    }
    seen[v] = 1;
  }
  return false;
}

Tree build_decision_tree(const ValidatedProblem& problem, std::span<const int> order,
                         OpCounter& ctx) {
  check_order(problem, order);
  const std::vector<int> chance = chance_prefix(problem, order);
  std::vector<int> chance_pos(problem.n_vars(), -1);
  for (int i = 0; i < static_cast<int>(chance.size()); ++i) chance_pos[chance[i]] = i;

  std::function<double(int, int, std::span<const int>)> edge_probability;
  std::vector<Cpt> chain;
  if (requires_bayesian_revision(problem, order)) {
    const JointTable joint = joint_distribution(problem, ctx, Phase::Representation);
    chain = conditionals_from_joint(joint, chance, ctx, Phase::Representation);
    edge_probability = [&problem, &chain, chance_pos](int v, int value,
                                                      std::span<const int> assignment) {
      const Cpt& cpt = chain[chance_pos[v]];
      const auto width = static_cast<std::int64_t>(problem.var(v).frame.size());
      const std::int64_t row = assignment_code(cpt.parents, assignment, problem.variables());
      return cpt.rows[row * width + value];
    };
  } else {
    // The required conditionals are specified in the problem: lookups only.
    edge_probability = [&problem](int v, int value, std::span<const int> assignment) {
      const Cpt& cpt = problem.cpt_for(v);
      const auto width = static_cast<std::int64_t>(problem.var(v).frame.size());
      const std::int64_t row = assignment_code(cpt.parents, assignment, problem.variables());
      return cpt.rows[row * width + value];
    };
  }
  return ShapeBuilder(problem, order, TreeKind::DecisionTree, edge_probability).build();
}

Tree build_scenario_tree(const ValidatedProblem& problem, std::span<const int> order,
                         OpCounter& ctx) {
  check_order(problem, order);
  Tree tree = ShapeBuilder(problem, order, TreeKind::ScenarioTree, nullptr).build();
  const PathProbabilityTable pi =
      path_probabilities(tree, problem, ctx, Phase::Representation);
  for (NodeId leaf : tree.leaves) tree.nodes[leaf].path_probability = pi.at(leaf);
  return tree;
}

Tree build_game_tree(const ValidatedProblem& problem, OpCounter& ctx) {
  (void)ctx;  // game trees need no preprocessing: zero counted operations
  std::vector<int> order = problem.causal_order();
  order.insert(order.end(), problem.decision_order().begin(), problem.decision_order().end());
  auto edge_probability = [&problem](int v, int value, std::span<const int> assignment) {
    const Cpt& cpt = problem.cpt_for(v);
    const auto width = static_cast<std::int64_t>(problem.var(v).frame.size());
    const std::int64_t row = assignment_code(cpt.parents, assignment, problem.variables());
    return cpt.rows[row * width + value];
  };
  return ShapeBuilder(problem, order, TreeKind::GameTree, edge_probability).build();
}

// ---------------------------------------------------------------------------
// Coalescence.

namespace {

struct SubtreeKey {
  int kind = 0;
  int variable = -1;
  int info_set = -1;
  double utility = 0.0;
  double path_probability = -1.0;
  // (value, quantized probability or -1, representative child)
  std::vector<std::tuple<int, double, NodeId>> edges;

  bool operator<(const SubtreeKey& other) const {
    if (kind != other.kind) return kind < other.kind;
    if (variable != other.variable) return variable < other.variable;
    if (info_set != other.info_set) return info_set < other.info_set;
    if (utility != other.utility) return utility < other.utility;
    if (path_probability != other.path_probability) {
      return path_probability < other.path_probability;
    }
    return edges < other.edges;
  }
};

}  // namespace

Tree coalesce(const Tree& tree, double tolerance, CoalesceStats* stats) {
  const auto quantize = [tolerance](double x) { return std::round(x / tolerance) * tolerance; };

  Tree out;
  out.kind = tree.kind;
  out.variables = tree.variables;
  out.coalesced = true;

  std::map<SubtreeKey, NodeId> seen;
  std::vector<NodeId> representative(tree.nodes.size(), kNoNode);

  auto reduce = [&](auto&& self, NodeId id) -> NodeId {
    const TreeNode& node = tree.nodes[id];
    SubtreeKey key;
    key.kind = static_cast<int>(node.kind);
    key.variable = node.variable;
    key.info_set = node.kind == NodeKind::Decision ? node.info_set : -1;
    if (node.kind == NodeKind::Leaf) {
      key.utility = quantize(node.utility);
      if (node.path_probability) key.path_probability = quantize(*node.path_probability);
    }
    for (const Edge& edge : node.edges) {
      const NodeId child = self(self, edge.child);
      key.edges.emplace_back(edge.value,
                             edge.probability ? quantize(*edge.probability) : -1.0, child);
    }
    if (const auto it = seen.find(key); it != seen.end()) {
      representative[id] = it->second;
      return it->second;
    }
    const NodeId rep = static_cast<NodeId>(out.nodes.size());
    out.nodes.emplace_back();
    TreeNode& copy = out.nodes[rep];
    copy.kind = node.kind;
    copy.variable = node.variable;
    copy.info_set = node.info_set;
    copy.utility = node.utility;
    copy.path_probability = node.path_probability;
    copy.weighted_utility = node.weighted_utility;
    for (std::size_t e = 0; e < node.edges.size(); ++e) {
      Edge edge = node.edges[e];
      edge.child = std::get<2>(key.edges[e]);
      copy.edges.push_back(edge);
    }
    seen.emplace(std::move(key), rep);
    representative[id] = rep;
    return rep;
  };
  out.root = reduce(reduce, tree.root);

  // Leaves of the DAG in depth-first order, each listed once.
  {
    std::vector<char> visited(out.nodes.size(), 0);
    auto collect = [&](auto&& self, NodeId id) -> void {
      if (visited[id]) return;
      visited[id] = 1;
      if (out.nodes[id].kind == NodeKind::Leaf) {
        out.leaves.push_back(id);
        return;
      }
      for (const Edge& edge : out.nodes[id].edges) self(self, edge.child);
    };
    collect(collect, out.root);
  }

  // Information sets survive with members remapped (and deduplicated when
  // two members merged).
  for (const InformationSet& set : tree.information_sets) {
    InformationSet remapped;
    remapped.id = set.id;
    remapped.variable = set.variable;
    remapped.key = set.key;
    for (NodeId member : set.members) {
      const NodeId rep = representative[member];
      if (std::find(remapped.members.begin(), remapped.members.end(), rep) ==
          remapped.members.end()) {
        remapped.members.push_back(rep);
      }
    }
    out.information_sets.push_back(std::move(remapped));
  }

  if (stats) {
    stats->nodes_before = static_cast<int>(tree.nodes.size());
    stats->nodes_after = static_cast<int>(out.nodes.size());
  }
  return out;
}

}  // namespace dtsolve
