#include "dtsolve/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

namespace dtsolve {

namespace {
constexpr double kRowSumTolerance = 1e-9;
}

int Variable::frame_index(std::string_view value) const {
  for (int i = 0; i < static_cast<int>(frame.size()); ++i) {
    if (frame[i] == value) return i;
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Assignment codes.

std::int64_t frame_product(std::span<const int> vars, const std::vector<Variable>& variables) {
  std::int64_t product = 1;
  for (int v : vars) product *= static_cast<std::int64_t>(variables[v].frame.size());
  return product;
}

std::int64_t assignment_code(std::span<const int> vars, std::span<const int> assignment,
                             const std::vector<Variable>& variables) {
  std::int64_t code = 0;
  for (int v : vars) {
    code = code * static_cast<std::int64_t>(variables[v].frame.size()) + assignment[v];
  }
  return code;
}

void decode_assignment(std::int64_t code, std::span<const int> vars,
                       const std::vector<Variable>& variables, std::span<int> assignment) {
  for (int i = static_cast<int>(vars.size()) - 1; i >= 0; --i) {
    const auto card = static_cast<std::int64_t>(variables[vars[i]].frame.size());
    assignment[vars[i]] = static_cast<int>(code % card);
    code /= card;
  }
}

double utility_at(const UtilityTable& table, std::span<const int> assignment,
                  const std::vector<Variable>& variables) {
  return table.entries[assignment_code(table.scope, assignment, variables)];
}

// ---------------------------------------------------------------------------
// Validation.

namespace {

std::vector<int> topological_chance_order(const ProblemDefinition& def,
                                          const std::vector<int>& cpt_of) {
  const int n = static_cast<int>(def.variables.size());
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> children(n);
  for (int v = 0; v < n; ++v) {
    if (def.variables[v].kind != VariableKind::Chance) continue;
    for (int p : def.cpts[cpt_of[v]].parents) {
      children[p].push_back(v);
      ++indegree[v];
    }
  }
  std::vector<int> order;
  std::vector<int> ready;
  for (int v = 0; v < n; ++v) {
    if (def.variables[v].kind == VariableKind::Chance && indegree[v] == 0) ready.push_back(v);
  }
  // Declaration order breaks ties so the derived order is reproducible.
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end());
    int v = ready.front();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int c : children[v]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  int chance_count = 0;
  for (const auto& var : def.variables) {
    if (var.kind == VariableKind::Chance) ++chance_count;
  }
  if (static_cast<int>(order.size()) != chance_count) {
    fail(Errc::Cycle, "CPT parent graph is cyclic");
  }
  return order;
}

}  // namespace

int ValidatedProblem::index_of(std::string_view name) const {
  for (int i = 0; i < n_vars(); ++i) {
    if (def_.variables[i].name == name) return i;
  }
  return -1;
}

const Cpt& ValidatedProblem::cpt_for(int chance_var) const {
  return def_.cpts[cpt_of_[chance_var]];
}

const std::vector<int>& ValidatedProblem::observed(int decision_var) const {
  return def_.observations[decision_var];
}

ValidatedProblem validate_problem(ProblemDefinition def) {
  const int n = static_cast<int>(def.variables.size());

  std::unordered_set<std::string> names;
  for (const auto& var : def.variables) {
    if (!names.insert(var.name).second) {
      fail(Errc::DuplicateName, "duplicate variable name '" + var.name + "'");
    }
    if (var.frame.size() < 2) {
      fail(Errc::BadFrame, "variable '" + var.name + "' needs at least 2 frame values");
    }
    std::unordered_set<std::string> values;
    for (const auto& value : var.frame) {
      if (!values.insert(value).second) {
        fail(Errc::BadFrame, "duplicate frame value '" + value + "' in '" + var.name + "'");
      }
    }
  }

  if (def.observations.size() != def.variables.size()) {
    def.observations.resize(def.variables.size());
  }
  for (int v = 0; v < n; ++v) {
    for (int o : def.observations[v]) {
      if (o < 0 || o >= n) fail(Errc::UnknownVariable, "observed variable out of range");
      if (o == v) fail(Errc::UnknownVariable, "variable cannot observe itself");
    }
    std::vector<int> sorted = def.observations[v];
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail(Errc::DuplicateName, "duplicate observation for '" + def.variables[v].name + "'");
    }
  }

  // One CPT per chance variable, valid rows.
  std::vector<int> cpt_of(n, -1);
  for (int c = 0; c < static_cast<int>(def.cpts.size()); ++c) {
    const Cpt& cpt = def.cpts[c];
    if (cpt.child < 0 || cpt.child >= n) fail(Errc::UnknownVariable, "cpt child out of range");
    const Variable& child = def.variables[cpt.child];
    if (child.kind != VariableKind::Chance) {
      fail(Errc::UnknownVariable, "cpt child '" + child.name + "' is not a chance variable");
    }
    if (cpt_of[cpt.child] != -1) {
      fail(Errc::DuplicateName, "duplicate cpt for '" + child.name + "'");
    }
    cpt_of[cpt.child] = c;
    for (int p : cpt.parents) {
      if (p < 0 || p >= n) fail(Errc::UnknownVariable, "cpt parent out of range");
      if (def.variables[p].kind != VariableKind::Chance) {
        fail(Errc::UnknownVariable, "cpt parent '" + def.variables[p].name +
                                        "' of '" + child.name + "' is not a chance variable");
      }
    }
    const auto rows = frame_product(cpt.parents, def.variables);
    const auto width = static_cast<std::int64_t>(child.frame.size());
    if (static_cast<std::int64_t>(cpt.rows.size()) != rows * width) {
      fail(Errc::MissingRow, "cpt for '" + child.name + "' must have one row per parent assignment");
    }
    for (std::int64_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::int64_t i = 0; i < width; ++i) {
        const double p = cpt.rows[r * width + i];
        if (p < 0.0 || p > 1.0) {
          fail(Errc::ProbabilityRange, "cpt entry for '" + child.name + "' outside [0,1]");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        fail(Errc::CptRowSum, "cpt row for '" + child.name + "' sums to " + std::to_string(sum));
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (def.variables[v].kind == VariableKind::Chance && cpt_of[v] == -1) {
      fail(Errc::MissingRow, "no cpt for chance variable '" + def.variables[v].name + "'");
    }
  }

  // Causal order: derive or check.
  std::vector<int> topo = topological_chance_order(def, cpt_of);
  if (def.causal_order.empty()) {
    def.causal_order = topo;
  } else {
    if (def.causal_order.size() != topo.size()) {
      fail(Errc::UnknownVariable, "causal order must list every chance variable exactly once");
    }
    std::vector<int> position(n, -1);
    for (int i = 0; i < static_cast<int>(def.causal_order.size()); ++i) {
      const int v = def.causal_order[i];
      if (v < 0 || v >= n || def.variables[v].kind != VariableKind::Chance || position[v] != -1) {
        fail(Errc::UnknownVariable, "causal order must list every chance variable exactly once");
      }
      position[v] = i;
    }
    for (int v : def.causal_order) {
      for (int p : def.cpts[cpt_of[v]].parents) {
        if (position[p] > position[v]) {
          fail(Errc::Cycle, "causal order is not topological: '" + def.variables[p].name +
                                "' follows its child '" + def.variables[v].name + "'");
        }
      }
    }
  }

  // Utility: total function over the scope's product frame.
  for (int v : def.utility.scope) {
    if (v < 0 || v >= n) fail(Errc::UnknownVariable, "utility scope variable out of range");
  }
  {
    std::vector<int> sorted = def.utility.scope;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail(Errc::DuplicateName, "duplicate variable in utility scope");
    }
  }
  if (static_cast<std::int64_t>(def.utility.entries.size()) !=
      frame_product(def.utility.scope, def.variables)) {
    fail(Errc::UtilityIncomplete, "utility table must cover every scope assignment");
  }

  ValidatedProblem problem;
  problem.def_ = std::move(def);
  problem.cpt_of_ = std::move(cpt_of);
  for (int v = 0; v < n; ++v) {
    if (problem.def_.variables[v].kind == VariableKind::Decision) {
      problem.decision_order_.push_back(v);
    }
  }
  problem.global_rank_.assign(n, -1);
  {
    int rank = 0;
    for (int v : problem.def_.causal_order) problem.global_rank_[v] = rank++;
    for (int v : problem.decision_order_) problem.global_rank_[v] = rank++;
  }
  for (int j = 0; j < static_cast<int>(problem.decision_order_.size()); ++j) {
    const int d = problem.decision_order_[j];
    std::vector<int> key = problem.def_.observations[d];
    for (int i = 0; i < j; ++i) {
      const int earlier = problem.decision_order_[i];
      if (std::find(key.begin(), key.end(), earlier) == key.end()) key.push_back(earlier);
    }
    std::sort(key.begin(), key.end(),
              [&](int a, int b) { return problem.global_rank_[a] < problem.global_rank_[b]; });
    problem.key_vars_.push_back(std::move(key));
  }
  return problem;
}

// ---------------------------------------------------------------------------
// Trees.

int Tree::chance_node_count() const {
  int count = 0;
  for (const auto& n : nodes) count += n.kind == NodeKind::Chance ? 1 : 0;
  return count;
}

int Tree::decision_node_count() const {
  int count = 0;
  for (const auto& n : nodes) count += n.kind == NodeKind::Decision ? 1 : 0;
  return count;
}

std::vector<std::pair<int, int>> Tree::path_assignment(NodeId id) const {
  std::vector<std::pair<int, int>> path;
  NodeId at = id;
  while (nodes[at].parent != kNoNode) {
    const TreeNode& parent = nodes[nodes[at].parent];
    path.emplace_back(parent.variable, parent.edges[nodes[at].parent_edge].value);
    at = nodes[at].parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// ---------------------------------------------------------------------------
// Information sets and strategies.

std::string information_set_id(const ValidatedProblem& problem, int variable,
                               std::span<const std::pair<int, int>> key) {
  std::string id = problem.var(variable).name;
  if (key.empty()) return id;
  id += "[";
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i > 0) id += ",";
    id += problem.var(key[i].first).name;
    id += ":";
    id += problem.var(key[i].first).frame[key[i].second];
  }
  id += "]";
  return id;
}

std::vector<InformationSet> canonical_information_sets(const ValidatedProblem& problem) {
  std::vector<InformationSet> sets;
  const auto& decisions = problem.decision_order();
  for (int j = 0; j < static_cast<int>(decisions.size()); ++j) {
    const int d = decisions[j];
    const std::vector<int>& key_vars = problem.key_vars(j);
    const std::int64_t combos = frame_product(key_vars, problem.variables());
    std::vector<int> assignment(problem.n_vars(), -1);
    for (std::int64_t code = 0; code < combos; ++code) {
      decode_assignment(code, key_vars, problem.variables(), assignment);
      InformationSet set;
      set.variable = d;
      for (int kv : key_vars) set.key.emplace_back(kv, assignment[kv]);
      set.id = information_set_id(problem, d, set.key);
      sets.push_back(std::move(set));
    }
  }
  return sets;
}

std::vector<Strategy> enumerate_strategies(const std::vector<InformationSet>& sets,
                                           const std::vector<Variable>& variables) {
  unsigned long long count = 1;
  for (const auto& set : sets) {
    count *= variables[set.variable].frame.size();
    if (count > (1ull << 26)) {
      throw std::length_error("strategy space too large to enumerate");
    }
  }
  std::vector<Strategy> strategies;
  strategies.reserve(count);
  Strategy current;
  current.choices.assign(sets.size(), 0);
  for (unsigned long long i = 0; i < count; ++i) {
    strategies.push_back(current);
    // Odometer with the last information set fastest: lexicographic order.
    for (int j = static_cast<int>(sets.size()) - 1; j >= 0; --j) {
      const int card = static_cast<int>(variables[sets[j].variable].frame.size());
      if (++current.choices[j] < card) break;
      current.choices[j] = 0;
    }
  }
  return strategies;
}

std::vector<Strategy> enumerate_strategies(const Tree& tree) {
  return enumerate_strategies(tree.information_sets, tree.variables);
}

int strategy_indicator(const Strategy& strategy, NodeId leaf, const Tree& tree) {
  if (tree.coalesced) {
    throw std::logic_error("strategy_indicator requires parent links (uncoalesced tree)");
  }
  NodeId at = leaf;
  while (tree.nodes[at].parent != kNoNode) {
    const TreeNode& parent = tree.nodes[tree.nodes[at].parent];
    if (parent.kind == NodeKind::Decision) {
      const int taken = parent.edges[tree.nodes[at].parent_edge].value;
      if (strategy.choices[parent.info_set] != taken) return 0;
    }
    at = tree.nodes[at].parent;
  }
  return 1;
}

}  // namespace dtsolve
