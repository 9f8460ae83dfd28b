#ifndef DTSOLVE_TEXTIO_HPP
#define DTSOLVE_TEXTIO_HPP

#include <iosfwd>
#include <string>
#include <string_view>

#include "dtsolve/model.hpp"
#include "dtsolve/solvers.hpp"

namespace dtsolve {

// Parses the .dtp problem format:
//
//   problem "<name>"
//   chance <Var> { <v1> <v2> ... }
//   decision <Var> { <v1> ... } observes { <Var> ... }
//   cpt <Var> [| <Parent> ...] { [<parentVal> ...] : <p> ... }
//   utility { <Var> ... } { <val> ... : <number> ... }
//   order { <Var> ... }
//
// Tokens are whitespace-separated; `#` starts a comment to end of line.
// Sections may appear in any order except `problem`, which comes first.
// Throws Error (E_SYNTAX with position, or any validate_problem error).
ValidatedProblem parse_problem(std::string_view text);

// Canonical .dtp rendering; parse(render(parse(x))) == parse(x).
std::string render_problem(const ProblemDefinition& def);

// DOT digraph: decision nodes as boxes, chance nodes as circles, leaves as
// diamonds; edges labeled value[:probability]; information sets with two or
// more members share a dashed cluster. With a solution, chosen decision
// edges are bold and pruned node values annotate the labels.
std::string export_dot(const Tree& tree, const Solution* solution = nullptr);

std::string render_ops(const CostReport& report);
std::string render_strategy_line(const Solution& solution,
                                 const std::vector<Variable>& variables);

// `solve` and `bench` subcommands; returns the process exit code
// (0 success, 1 usage error, 2 problem/validation error).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dtsolve

#endif  // DTSOLVE_TEXTIO_HPP
