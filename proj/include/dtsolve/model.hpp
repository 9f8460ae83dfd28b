#ifndef DTSOLVE_MODEL_HPP
#define DTSOLVE_MODEL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtsolve/error.hpp"

namespace dtsolve {

enum class VariableKind { Chance, Decision };

// A finite variable. The frame order is declaration order and is the
// universal iteration and tie-break order throughout the library.
struct Variable {
  std::string name;
  VariableKind kind = VariableKind::Chance;
  std::vector<std::string> frame;

  int frame_index(std::string_view value) const;
  friend bool operator==(const Variable&, const Variable&) = default;
};

// Conditional probability table Pr(child | parents). Rows are stored densely:
// parent assignments in depth-first frame order (first parent most
// significant), each row listing probabilities in the child's frame order.
struct Cpt {
  int child = -1;
  std::vector<int> parents;
  std::vector<double> rows;

  friend bool operator==(const Cpt&, const Cpt&) = default;
};

// Total utility function over the product frame of `scope`, stored densely in
// depth-first frame order.
struct UtilityTable {
  std::vector<int> scope;
  std::vector<double> entries;

  friend bool operator==(const UtilityTable&, const UtilityTable&) = default;
};

struct ProblemDefinition {
  std::string name;
  std::vector<Variable> variables;
  std::vector<Cpt> cpts;
  UtilityTable utility;
  // Indexed like `variables`; empty for chance variables. Values are indices
  // of the variables observed before the decision is chosen.
  std::vector<std::vector<int>> observations;
  // Chance variable indices in causal order; may be left empty, in which case
  // validation derives a topological order of CPT parenthood.
  std::vector<int> causal_order;

  friend bool operator==(const ProblemDefinition&, const ProblemDefinition&) = default;
};

// A ProblemDefinition whose invariants have been checked, with derived lookup
// structure. Immutable after construction; safe for concurrent reads.
class ValidatedProblem {
 public:
  const ProblemDefinition& def() const { return def_; }
  const std::vector<Variable>& variables() const { return def_.variables; }
  const Variable& var(int index) const { return def_.variables[index]; }
  int n_vars() const { return static_cast<int>(def_.variables.size()); }

  // -1 when the name is unknown.
  int index_of(std::string_view name) const;

  bool is_chance(int index) const { return var(index).kind == VariableKind::Chance; }
  bool is_decision(int index) const { return var(index).kind == VariableKind::Decision; }

  // Chance variables in causal order.
  const std::vector<int>& causal_order() const { return def_.causal_order; }
  // Decision variables in declaration order.
  const std::vector<int>& decision_order() const { return decision_order_; }

  const Cpt& cpt_for(int chance_var) const;
  const std::vector<int>& observed(int decision_var) const;

  // Chance variables rank before decision variables; within each group the
  // order is causal (chance) or declaration (decision). Used to canonicalize
  // information-set keys.
  int global_rank(int var_index) const { return global_rank_[var_index]; }

  // Observed variables of the j-th decision variable plus all earlier
  // decision variables, sorted by global rank. This is the assignment a
  // decision maker can distinguish when choosing.
  const std::vector<int>& key_vars(int decision_position) const {
    return key_vars_[decision_position];
  }

  friend ValidatedProblem validate_problem(ProblemDefinition def);

 private:
  ProblemDefinition def_;
  std::vector<int> decision_order_;
  std::vector<int> global_rank_;
  std::vector<std::vector<int>> key_vars_;
  std::vector<int> cpt_of_;  // variable index -> cpt index, -1 for decisions
};

// Checks all type invariants, normalizing causal_order if absent.
// Throws Error with one of: E_CPT_ROW_SUM, E_CYCLE, E_MISSING_ROW,
// E_UTILITY_INCOMPLETE, E_UNKNOWN_VARIABLE (plus E_BAD_FRAME,
// E_DUPLICATE_NAME, E_PROBABILITY_RANGE for structural defects).
ValidatedProblem validate_problem(ProblemDefinition def);

// ---------------------------------------------------------------------------
// Mixed-radix assignment codes. Codes are depth-first over the listed
// variables: the first variable is the most significant digit and digits run
// in frame order.

std::int64_t frame_product(std::span<const int> vars, const std::vector<Variable>& variables);
std::int64_t assignment_code(std::span<const int> vars, std::span<const int> assignment,
                             const std::vector<Variable>& variables);
void decode_assignment(std::int64_t code, std::span<const int> vars,
                       const std::vector<Variable>& variables, std::span<int> assignment);

// Utility lookup for a full assignment (indexed by variable).
double utility_at(const UtilityTable& table, std::span<const int> assignment,
                  const std::vector<Variable>& variables);

// ---------------------------------------------------------------------------
// Trees.

using NodeId = int;
inline constexpr NodeId kNoNode = -1;

enum class NodeKind { Chance, Decision, Leaf };

struct Edge {
  int value = -1;  // frame index of the node's variable
  NodeId child = kNoNode;
  std::optional<double> probability;  // chance edges of decision/game trees
};

struct TreeNode {
  NodeKind kind = NodeKind::Leaf;
  int variable = -1;
  std::vector<Edge> edges;  // frame order
  NodeId parent = kNoNode;
  int parent_edge = -1;  // index into parent's edge list
  int info_set = -1;     // decision nodes only

  // Leaf payload.
  double utility = 0.0;
  std::optional<double> path_probability;
  std::optional<double> weighted_utility;
};

enum class TreeKind { DecisionTree, ScenarioTree, GameTree };

// A block of the partition of decision nodes. `key` is the observed
// assignment shared by all members, as (variable, frame value) pairs in
// global-rank order; it determines the canonical id.
struct InformationSet {
  std::string id;
  int variable = -1;
  std::vector<NodeId> members;
  std::vector<std::pair<int, int>> key;
};

struct Tree {
  TreeKind kind = TreeKind::DecisionTree;
  NodeId root = kNoNode;
  std::vector<TreeNode> nodes;
  std::vector<InformationSet> information_sets;
  // Labels copied from the problem so the tree is self-describing.
  std::vector<Variable> variables;
  std::vector<NodeId> leaves;  // depth-first order
  bool coalesced = false;      // rooted DAG with shared subtrees

  const TreeNode& node(NodeId id) const { return nodes[id]; }
  TreeNode& node(NodeId id) { return nodes[id]; }

  int chance_node_count() const;
  int decision_node_count() const;

  // (variable, value) pairs from root to `id`, root edge first.
  // Requires parent links, i.e. not available on coalesced trees.
  std::vector<std::pair<int, int>> path_assignment(NodeId id) const;
};

// One chosen frame value per information set, aligned with a tree's (or the
// canonical) information-set list.
struct Strategy {
  std::vector<int> choices;

  friend bool operator==(const Strategy&, const Strategy&) = default;
  friend auto operator<=>(const Strategy&, const Strategy&) = default;
};

// The information structure of a problem independent of any tree: one set per
// (decision variable, assignment of its key variables), ordered by decision
// declaration then key code. Game and decision trees built from the same
// problem produce sets with these ids.
std::vector<InformationSet> canonical_information_sets(const ValidatedProblem& problem);

std::string information_set_id(const ValidatedProblem& problem, int variable,
                               std::span<const std::pair<int, int>> key);

// All strategies in lexicographic order (set order major, frame order minor).
std::vector<Strategy> enumerate_strategies(const std::vector<InformationSet>& sets,
                                           const std::vector<Variable>& variables);
std::vector<Strategy> enumerate_strategies(const Tree& tree);

// 1 iff every decision edge on the root-to-leaf path matches the strategy's
// choice for the information set containing that decision node.
int strategy_indicator(const Strategy& strategy, NodeId leaf, const Tree& tree);

}  // namespace dtsolve

#endif  // DTSOLVE_MODEL_HPP
