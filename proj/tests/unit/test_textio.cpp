#include <doctest.h>

#include <sstream>

#include "../support/dot_check.hpp"
#include "../support/fixtures.hpp"
#include "dtsolve/textio.hpp"

using namespace dtsolve;
namespace fix = dtsolve::testing;
using dtsolve::testing::dot_is_valid;

TEST_SUITE_BEGIN("textio");

TEST_CASE("bundled md file parses to the expected numbers") {
  const ValidatedProblem problem =
      parse_problem(fix::read_file(fix::problem_path("medical-diagnosis.dtp")));
  CHECK(problem.def().name == "medical-diagnosis");
  CHECK(problem.cpt_for(problem.index_of("D")).rows[0] == doctest::Approx(0.10));
  CHECK(problem.cpt_for(problem.index_of("P")).rows[0] == doctest::Approx(0.80));
  CHECK(problem.cpt_for(problem.index_of("S")).rows[0] == doctest::Approx(0.70));
  // v(t, p, d) = 10.
  CHECK(problem.def().utility.entries[0] == doctest::Approx(10.0));
  // The bundled file and the programmatic fixture are the same problem.
  CHECK(problem.def() == fix::md_definition());
}

TEST_CASE("empty input fails at line 1") {
  try {
    parse_problem("");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Syntax);
    CHECK(e.pos().line == 1);
  }
}

TEST_CASE("cpt row arity is checked") {
  const std::string text = R"(problem "bad"
chance A { a ~a }
cpt A { : 0.2 0.3 0.5 }
utility { A } { a : 1
~a : 2 }
)";
  try {
    parse_problem(text);
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Syntax);
    CHECK(e.pos().line == 3);
  }
}

TEST_CASE("unknown variables are positioned errors") {
  const std::string text = R"(problem "bad"
chance A { a ~a }
cpt B { : 0.5 0.5 }
utility { A } { a : 1
~a : 2 }
)";
  CHECK_THROWS_WITH_AS(parse_problem(text), doctest::Contains("E_UNKNOWN_VARIABLE"), Error);
}

TEST_CASE("sections may appear in any order") {
  const std::string text = R"(problem "reordered"
utility { A } { a : 1
~a : 2 }
cpt A { : 0.5 0.5 }
chance A { a ~a }
)";
  const ValidatedProblem problem = parse_problem(text);
  CHECK(problem.n_vars() == 1);
}

TEST_CASE("render and reparse round-trips the md problem") {
  const std::string original = fix::read_file(fix::problem_path("medical-diagnosis.dtp"));
  const ValidatedProblem problem = parse_problem(original);
  const std::string rendered = render_problem(problem.def());
  const ValidatedProblem reparsed = parse_problem(rendered);
  CHECK(reparsed.def() == problem.def());
}

TEST_CASE("round-trip preserves generated problems") {
  for (std::uint64_t seed = 61; seed <= 64; ++seed) {
    const ValidatedProblem problem = fix::random_problem(3, 2, seed);
    const ValidatedProblem reparsed = parse_problem(render_problem(problem.def()));
    CHECK(reparsed.def() == problem.def());
  }
}

TEST_CASE("md game tree exports two dashed clusters of four members") {
  const ValidatedProblem problem = fix::md_problem();
  OpCounter ctx;
  const Tree tree = build_game_tree(problem, ctx);
  const std::string dot = export_dot(tree);
  CHECK(dot_is_valid(dot));
  CHECK(dot.find("cluster_0") != std::string::npos);
  CHECK(dot.find("cluster_1") != std::string::npos);
  CHECK(dot.find("cluster_2") == std::string::npos);
  CHECK(dot.find("style=dashed") != std::string::npos);
  CHECK(dot.find("T[S:s]") != std::string::npos);
}

TEST_CASE("a single leaf renders as one diamond") {
  Tree tree;
  tree.kind = TreeKind::DecisionTree;
  tree.root = 0;
  tree.nodes.emplace_back();
  tree.nodes[0].kind = NodeKind::Leaf;
  tree.nodes[0].utility = 5.0;
  tree.leaves = {0};
  const std::string dot = export_dot(tree);
  CHECK(dot_is_valid(dot));
  CHECK(dot.find("diamond") != std::string::npos);
  CHECK(dot.find("->") == std::string::npos);
}

TEST_CASE("solved decision tree bolds the chosen edge under S=s") {
  const ValidatedProblem problem = fix::md_problem();
  OpCounter ctx;
  const MethodRun run = run_method(problem, Method::DtRollback, SolveOptions{}, ctx);
  const std::string dot = export_dot(*run.tree, &run.solution);
  CHECK(dot_is_valid(dot));
  // The T node under S=s chooses t: a bold edge labeled plain "t".
  CHECK(dot.find("label=\"t\", style=bold") != std::string::npos);
  // Pruned values annotate node labels.
  CHECK(dot.find("=7.9880") != std::string::npos);
}

TEST_CASE("a coalesced DAG still renders as valid DOT") {
  const ValidatedProblem problem = fix::md_problem();
  SolveOptions options;
  options.coalesce = true;
  OpCounter ctx;
  const MethodRun run = run_method(problem, Method::DtRollback, options, ctx);
  const std::string dot = export_dot(*run.tree, &run.solution);
  CHECK(dot_is_valid(dot));
}

TEST_CASE("dot export of all three md trees is grammatical") {
  const ValidatedProblem problem = fix::md_problem();
  OpCounter ctx;
  CHECK(dot_is_valid(export_dot(
      build_decision_tree(problem, default_decision_tree_order(problem), ctx))));
  CHECK(dot_is_valid(export_dot(
      build_scenario_tree(problem, default_decision_tree_order(problem), ctx))));
  CHECK(dot_is_valid(export_dot(build_game_tree(problem, ctx))));
}

TEST_CASE("cli solves the bundled problem with op counts") {
  std::ostringstream out;
  std::ostringstream err;
  const std::string path = fix::problem_path("medical-diagnosis.dtp");
  const char* argv[] = {"dtsolve", "solve",       path.c_str(), "--method",
                        "gt-prune", "--count-ops"};
  const int code = run_cli(6, argv, out, err);
  CHECK(code == 0);
  CHECK(out.str().find("strategy: T[S:s]=t T[S:~s]=~t") != std::string::npos);
  CHECK(out.str().find("expected-utility: 7.9880") != std::string::npos);
  CHECK(out.str().find("ops: representation=0 solution=49 total=49") != std::string::npos);
}

TEST_CASE("cli matrix lists all four strategy utilities") {
  std::ostringstream out;
  std::ostringstream err;
  const std::string path = fix::problem_path("medical-diagnosis.dtp");
  const char* argv[] = {"dtsolve", "solve", path.c_str(), "--method", "matrix"};
  const int code = run_cli(5, argv, out, err);
  CHECK(code == 0);
  for (const char* eu : {"4.8300", "7.9880", "4.7820", "7.9400"}) {
    CHECK(out.str().find(eu) != std::string::npos);
  }
}

TEST_CASE("cli rejects a bogus method with a usage error") {
  std::ostringstream out;
  std::ostringstream err;
  const std::string path = fix::problem_path("medical-diagnosis.dtp");
  const char* argv[] = {"dtsolve", "solve", path.c_str(), "--method", "bogus"};
  const int code = run_cli(5, argv, out, err);
  CHECK(code == 1);
  CHECK_FALSE(err.str().empty());
}

TEST_CASE("cli maps problem errors to exit code 2") {
  std::ostringstream out;
  std::ostringstream err;
  const char* argv[] = {"dtsolve", "solve", "/nonexistent.dtp", "--method", "matrix"};
  CHECK(run_cli(5, argv, out, err) == 2);
}

TEST_CASE("json output carries the same numbers as the human rendering") {
  std::ostringstream out;
  std::ostringstream err;
  const std::string path = fix::problem_path("medical-diagnosis.dtp");
  const char* argv[] = {"dtsolve",  "solve",       path.c_str(), "--method",
                        "gt-prune", "--count-ops", "--json"};
  const int code = run_cli(7, argv, out, err);
  CHECK(code == 0);
  const std::string text = out.str();
  CHECK(text.find("\"expected_utility\": 7.988") != std::string::npos);
  CHECK(text.find("\"total\": 49") != std::string::npos);
  CHECK(text.find("\"T[S:s]\": \"t\"") != std::string::npos);
}

TEST_CASE("cli accepts an explicit decision-tree order") {
  std::ostringstream out;
  std::ostringstream err;
  const std::string path = fix::problem_path("medical-diagnosis.dtp");
  const char* argv[] = {"dtsolve",     "solve",      path.c_str(), "--method", "dt-rollback",
                        "--dt-order", "S,T,P,D",    "--count-ops"};
  const int code = run_cli(8, argv, out, err);
  CHECK(code == 0);
  CHECK(out.str().find("ops: representation=30 solution=41 total=71") != std::string::npos);
}

TEST_CASE("cli rejects option combinations that make no sense") {
  std::ostringstream out;
  std::ostringstream err;
  const std::string path = fix::problem_path("medical-diagnosis.dtp");
  const char* coalesce_argv[] = {"dtsolve", "solve",    path.c_str(),
                                 "--method", "gt-prune", "--coalesce"};
  CHECK(run_cli(6, coalesce_argv, out, err) == 1);
  const char* dot_argv[] = {"dtsolve", "solve", path.c_str(), "--method",
                            "matrix",  "--dot", "/tmp/out.dot"};
  CHECK(run_cli(7, dot_argv, out, err) == 1);
}

TEST_CASE("cli reports order violations as problem errors") {
  std::ostringstream out;
  std::ostringstream err;
  const std::string path = fix::problem_path("medical-diagnosis.dtp");
  const char* argv[] = {"dtsolve",     "solve",    path.c_str(), "--method", "dt-rollback",
                        "--dt-order", "T,S,P,D"};
  CHECK(run_cli(7, argv, out, err) == 2);
  CHECK(err.str().find("E_ORDER_VIOLATES_INFORMATION") != std::string::npos);
}

TEST_CASE("cli bench prints a scaling table") {
  std::ostringstream out;
  std::ostringstream err;
  const char* argv[] = {"dtsolve", "bench",    "--chance", "3",        "--decision", "1",
                        "--seed",  "1",        "--methods", "gt-prune"};
  const int code = run_cli(10, argv, out, err);
  CHECK(code == 0);
  CHECK(out.str().find("gt-prune\t3\t1\t0\t49\t56\t0.8750") != std::string::npos);
}

TEST_SUITE_END();
