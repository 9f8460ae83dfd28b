#include "dtsolve/bench.hpp"

#include <cmath>
#include <string>

namespace dtsolve {

std::vector<std::vector<int>> observe_last_pattern(int m, int n) {
  std::vector<std::vector<int>> observed(n);
  for (auto& set : observed) set.push_back(m - 1);
  return observed;
}

ValidatedProblem generate_problem(const BenchConfig& cfg) {
  if (cfg.chance_vars < 1) fail(Errc::BadFrame, "bench problems need at least one chance variable");
  if (cfg.decision_vars < 0 ||
      static_cast<int>(cfg.observed.size()) != cfg.decision_vars) {
    fail(Errc::BadFrame, "observation pattern must cover every decision variable");
  }

  SplitMix64 rng(cfg.seed);
  ProblemDefinition def;
  def.name = "bench-m" + std::to_string(cfg.chance_vars) + "-n" +
             std::to_string(cfg.decision_vars) + "-s" + std::to_string(cfg.seed);

  for (int i = 0; i < cfg.chance_vars; ++i) {
    Variable var;
    var.name = "C" + std::to_string(i + 1);
    var.kind = VariableKind::Chance;
    const std::string tag = "c" + std::to_string(i + 1);
    var.frame = {tag, "~" + tag};
    def.variables.push_back(std::move(var));
  }
  for (int j = 0; j < cfg.decision_vars; ++j) {
    Variable var;
    var.name = "D" + std::to_string(j + 1);
    var.kind = VariableKind::Decision;
    const std::string tag = "d" + std::to_string(j + 1);
    var.frame = {tag, "~" + tag};
    def.variables.push_back(std::move(var));
  }

  def.observations.resize(def.variables.size());
  for (int j = 0; j < cfg.decision_vars; ++j) {
    for (int c : cfg.observed[j]) {
      if (c < 0 || c >= cfg.chance_vars) {
        fail(Errc::UnknownVariable, "observation pattern references a missing chance variable");
      }
      def.observations[cfg.chance_vars + j].push_back(c);
    }
  }

  // Chance chain C1 -> C2 -> ... with probabilities bounded away from {0,1}
  // so conditioning events never vanish.
  for (int i = 0; i < cfg.chance_vars; ++i) {
    Cpt cpt;
    cpt.child = i;
    if (i > 0) cpt.parents.push_back(i - 1);
    const int rows = i > 0 ? 2 : 1;
    for (int r = 0; r < rows; ++r) {
      const double p = rng.uniform(0.05, 0.95);
      cpt.rows.push_back(p);
      cpt.rows.push_back(1.0 - p);
    }
    def.cpts.push_back(std::move(cpt));
  }

  for (int v = 0; v < static_cast<int>(def.variables.size()); ++v) {
    def.utility.scope.push_back(v);
  }
  const std::int64_t entries = frame_product(def.utility.scope, def.variables);
  def.utility.entries.reserve(entries);
  for (std::int64_t e = 0; e < entries; ++e) {
    def.utility.entries.push_back(rng.uniform(0.0, 10.0));
  }

  return validate_problem(std::move(def));
}

double formula_total(Method method, int m, int n, int k) {
  const auto p2 = [](int e) { return std::exp2(e); };
  switch (method) {
    case Method::Matrix: return p2(m + k + 1) + p2(m + 1);
    case Method::DtRollback: return p2(m + n + 1) + p2(m + 2) + p2(m);
    case Method::StPrune: return p2(m + n + 1) + p2(m + 1);
    case Method::GtRollback: return p2(m + n + 1) + p2(m + n) + p2(m + n - 1) + p2(m + 1);
    case Method::GtPrune: return p2(m + n + 1) + p2(m + n - 1) + p2(m + 1);
  }
  return 0.0;
}

std::vector<ScalingRow> verify_scaling(std::span<const BenchConfig> cells,
                                       std::span<const Method> methods) {
  std::vector<ScalingRow> rows;
  for (Method method : methods) {
    for (const BenchConfig& cell : cells) {
      for (int trial = 0; trial < cell.trials; ++trial) {
        BenchConfig cfg = cell;
        cfg.seed = cell.seed + static_cast<std::uint64_t>(trial);
        const ValidatedProblem problem = generate_problem(cfg);
        const int k = static_cast<int>(canonical_information_sets(problem).size());

        OpCounter ctx;
        const MethodRun run = run_method(problem, method, SolveOptions{}, ctx);

        ScalingRow row;
        row.method = method;
        row.m = cfg.chance_vars;
        row.n = cfg.decision_vars;
        row.trial = trial;
        row.measured_total = run.solution.cost.total();
        row.formula_total = formula_total(method, row.m, row.n, k);
        row.ratio = static_cast<double>(row.measured_total) / row.formula_total;
        row.within_band = row.ratio >= 0.5 && row.ratio <= 2.0;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace dtsolve
