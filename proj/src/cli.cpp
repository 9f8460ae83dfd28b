#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtsolve/bench.hpp"
#include "dtsolve/textio.hpp"

namespace dtsolve {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      if (!current.empty()) parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) parts.push_back(current);
  return parts;
}

json ops_json(const CostReport& report) {
  const auto phase = [](const PhaseCounts& c) {
    return json{{"add", c.add}, {"mul", c.mul}, {"div", c.div},
                {"cmp", c.cmp}, {"total", c.total()}};
  };
  return json{{"representation", phase(report.representation)},
              {"solution", phase(report.solution)},
              {"total", report.total()}};
}

json strategy_json(const Solution& solution, const Strategy& strategy,
                   const std::vector<Variable>& variables) {
  json out = json::object();
  for (std::size_t i = 0; i < solution.information_sets.size(); ++i) {
    const InformationSet& set = solution.information_sets[i];
    out[set.id] = variables[set.variable].frame[strategy.choices[i]];
  }
  return out;
}

int run_solve(const std::string& file, const std::string& method_text,
              const std::string& dt_order_text, bool coalesce, bool count_ops,
              const std::string& dot_path, bool emit_json, std::ostream& out,
              std::ostream& err) {
  const auto method = method_from_name(method_text);
  if (!method) {
    err << "unknown method '" << method_text << "'\n";
    return 1;
  }
  if (coalesce && *method != Method::DtRollback) {
    err << "--coalesce applies to dt-rollback only\n";
    return 1;
  }
  if (!dt_order_text.empty() && *method != Method::DtRollback &&
      *method != Method::StPrune) {
    err << "--dt-order applies to dt-rollback and st-prune only\n";
    return 1;
  }
  if (!dot_path.empty() && *method == Method::Matrix) {
    err << "--dot needs a tree method\n";
    return 1;
  }

  const ValidatedProblem problem = parse_problem(read_file(file));

  SolveOptions options;
  options.coalesce = coalesce;
  for (const std::string& name : split_csv(dt_order_text)) {
    const int index = problem.index_of(name);
    if (index < 0) fail(Errc::UnknownVariable, "unknown variable '" + name + "' in --dt-order");
    options.dt_order.push_back(index);
  }

  OpCounter ctx;
  const MethodRun run = run_method(problem, *method, options, ctx);
  const Solution& solution = run.solution;

  if (!dot_path.empty() && run.tree) {
    std::ofstream dot(dot_path);
    if (!dot) throw std::runtime_error("cannot write '" + dot_path + "'");
    dot << export_dot(*run.tree, &solution);
  }

  if (emit_json) {
    json doc;
    doc["problem"] = problem.def().name;
    doc["method"] = std::string(method_name(*method));
    doc["strategy"] = strategy_json(solution, solution.strategy, problem.variables());
    doc["expected_utility"] = solution.expected_utility;
    doc["ops"] = ops_json(solution.cost);
    if (!solution.per_strategy_utilities.empty()) {
      json rows = json::array();
      for (const auto& [strategy, eu] : solution.per_strategy_utilities) {
        rows.push_back(json{{"strategy", strategy_json(solution, strategy, problem.variables())},
                            {"expected_utility", eu}});
      }
      doc["per_strategy"] = rows;
    }
    if (!solution.set_traces.empty()) {
      json sets = json::array();
      for (const InfoSetTrace& trace : solution.set_traces) {
        const InformationSet& set = solution.information_sets[trace.set];
        const Variable& var = problem.var(set.variable);
        json scores = json::object();
        for (std::size_t v = 0; v < trace.value_scores.size(); ++v) {
          scores[var.frame[v]] = trace.value_scores[v];
        }
        sets.push_back(json{{"id", set.id},
                            {"member_probabilities", trace.member_probabilities},
                            {"value_scores", scores},
                            {"chosen", var.frame[trace.chosen]}});
      }
      doc["information_sets"] = sets;
    }
    if (coalesce) {
      doc["coalesce"] = json{{"nodes_before", run.coalesce.nodes_before},
                             {"nodes_after", run.coalesce.nodes_after},
                             {"merged_subtrees", run.coalesce.merged_subtrees()}};
    }
    out << doc.dump(2) << "\n";
    return 0;
  }

  char eu_text[40];
  if (!solution.per_strategy_utilities.empty()) {
    for (const auto& [strategy, eu] : solution.per_strategy_utilities) {
      Solution row;
      row.strategy = strategy;
      row.information_sets = solution.information_sets;
      std::snprintf(eu_text, sizeof(eu_text), "%.4f", eu);
      std::string line = render_strategy_line(row, problem.variables());
      out << "strategy-eu:" << line.substr(std::string("strategy:").size()) << " -> "
          << eu_text << "\n";
    }
  }
  if (coalesce) {
    out << "coalesce: nodes=" << run.coalesce.nodes_before << "->"
        << run.coalesce.nodes_after << " merged=" << run.coalesce.merged_subtrees() << "\n";
  }
  out << render_strategy_line(solution, problem.variables()) << "\n";
  std::snprintf(eu_text, sizeof(eu_text), "%.4f", solution.expected_utility);
  out << "expected-utility: " << eu_text << "\n";
  if (count_ops) out << render_ops(solution.cost) << "\n";
  return 0;
}

int run_bench(int m, int n, std::uint64_t seed, const std::string& methods_text, int trials,
              bool emit_json, std::ostream& out, std::ostream& err) {
  std::vector<Method> methods;
  for (const std::string& name : split_csv(methods_text)) {
    const auto method = method_from_name(name);
    if (!method) {
      err << "unknown method '" << name << "'\n";
      return 1;
    }
    methods.push_back(*method);
  }
  if (methods.empty()) {
    for (Method method : kAllMethods) methods.push_back(method);
  }

  BenchConfig cfg;
  cfg.chance_vars = m;
  cfg.decision_vars = n;
  cfg.observed = observe_last_pattern(m, n);
  cfg.seed = seed;
  cfg.trials = trials;
  const std::vector<BenchConfig> cells = {cfg};
  const std::vector<ScalingRow> rows = verify_scaling(cells, methods);

  if (emit_json) {
    json doc = json::array();
    for (const ScalingRow& row : rows) {
      doc.push_back(json{{"method", std::string(method_name(row.method))},
                         {"m", row.m},
                         {"n", row.n},
                         {"trial", row.trial},
                         {"measured_total", row.measured_total},
                         {"formula_total", row.formula_total},
                         {"ratio", row.ratio}});
    }
    out << doc.dump(2) << "\n";
    return 0;
  }
  out << "method\tm\tn\ttrial\tmeasured\tformula\tratio\n";
  for (const ScalingRow& row : rows) {
    char ratio_text[40];
    std::snprintf(ratio_text, sizeof(ratio_text), "%.4f", row.ratio);
    out << method_name(row.method) << "\t" << row.m << "\t" << row.n << "\t" << row.trial
        << "\t" << row.measured_total << "\t" << static_cast<long long>(row.formula_total)
        << "\t" << ratio_text << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solver for finite Bayesian decision problems"};
  app.require_subcommand(1);

  std::string file;
  std::string method_text;
  std::string dt_order_text;
  std::string dot_path;
  bool coalesce = false;
  bool count_ops = false;
  bool solve_json = false;

  CLI::App* solve = app.add_subcommand("solve", "Solve a .dtp problem file");
  solve->add_option("file", file, "problem file")->required();
  solve->add_option("--method", method_text, "matrix|dt-rollback|st-prune|gt-rollback|gt-prune")
      ->required();
  solve->add_option("--dt-order", dt_order_text, "comma-separated variable order");
  solve->add_flag("--coalesce", coalesce, "merge identical subtrees before rollback");
  solve->add_flag("--count-ops", count_ops, "print the operation report");
  solve->add_option("--dot", dot_path, "write a DOT rendering of the solved tree");
  solve->add_flag("--json", solve_json, "machine-readable output");

  int bench_m = 3;
  int bench_n = 1;
  std::uint64_t bench_seed = 1;
  std::string bench_methods;
  int bench_trials = 1;
  bool bench_json = false;

  CLI::App* bench = app.add_subcommand("bench", "Operation-count scaling on generated problems");
  bench->add_option("--chance", bench_m, "number of binary chance variables")->required();
  bench->add_option("--decision", bench_n, "number of binary decision variables")->required();
  bench->add_option("--seed", bench_seed, "generator seed");
  bench->add_option("--methods", bench_methods, "comma-separated methods (default: all)");
  bench->add_option("--trials", bench_trials, "trials per configuration");
  bench->add_flag("--json", bench_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // exit() renders help requests and usage messages to the right stream.
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) {
      return run_solve(file, method_text, dt_order_text, coalesce, count_ops, dot_path,
                       solve_json, out, err);
    }
    return run_bench(bench_m, bench_n, bench_seed, bench_methods, bench_trials, bench_json,
                     out, err);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 2;
  }
}

}  // namespace dtsolve
