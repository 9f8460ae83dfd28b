#include "dtsolve/textio.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace dtsolve {

namespace {

// ---------------------------------------------------------------------------
// Tokenizer.

enum class TokenKind { Ident, Number, String, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  double number = 0.0;
  SourcePos pos;
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '~';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '~' || c == '\'';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_space();
      if (at_end()) break;
      tokens.push_back(next());
    }
    Token end;
    end.pos = {line_, column_};
    tokens.push_back(end);
    return tokens;
  }

 private:
  bool at_end() const { return offset_ >= text_.size(); }
  char peek() const { return text_[offset_]; }

  char advance() {
    const char c = text_[offset_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_space() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        advance();
      } else if (peek() == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token next() {
    Token token;
    token.pos = {line_, column_};
    const char c = peek();
    if (c == '{' || c == '}' || c == '|' || c == ':') {
      token.kind = TokenKind::Punct;
      token.text = std::string(1, advance());
      return token;
    }
    if (c == '"') {
      advance();
      token.kind = TokenKind::String;
      while (!at_end() && peek() != '"' && peek() != '\n') token.text += advance();
      if (at_end() || peek() != '"') {
        fail(Errc::Syntax, "unterminated string literal", token.pos);
      }
      advance();
      return token;
    }
    if (ident_start(c)) {
      token.kind = TokenKind::Ident;
      while (!at_end() && ident_char(peek())) token.text += advance();
      return token;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      token.kind = TokenKind::Number;
      while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                           peek() == '-' || peek() == '+' || peek() == 'e' || peek() == 'E')) {
        token.text += advance();
      }
      char* parse_end = nullptr;
      token.number = std::strtod(token.text.c_str(), &parse_end);
      if (parse_end != token.text.c_str() + token.text.size() || token.text.empty()) {
        fail(Errc::Syntax, "malformed number '" + token.text + "'", token.pos);
      }
      return token;
    }
    fail(Errc::Syntax, std::string("unexpected character '") + c + "'", token.pos);
  }

  std::string_view text_;
  std::size_t offset_ = 0;
  int line_ = 1;
  int column_ = 1;
};

// ---------------------------------------------------------------------------
// Parser. Sections are collected in file order and resolved once the whole
// file is read, so they may reference variables declared later.

struct RawCptRow {
  std::vector<Token> parent_values;
  std::vector<Token> probabilities;
  SourcePos pos;
};

struct RawCpt {
  Token child;
  std::vector<Token> parents;
  std::vector<RawCptRow> rows;
};

struct RawUtilityRow {
  std::vector<Token> values;
  Token value_number;
  SourcePos pos;
};

struct RawUtility {
  std::vector<Token> scope;
  std::vector<RawUtilityRow> rows;
  SourcePos pos;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ValidatedProblem run() {
    parse_sections();
    return resolve();
  }

 private:
  const Token& peek() const { return tokens_[at_]; }
  const Token& take() { return tokens_[at_++]; }

  bool at_punct(char c) const {
    return peek().kind == TokenKind::Punct && peek().text[0] == c;
  }

  void expect_punct(char c, const std::string& where) {
    if (!at_punct(c)) {
      fail(Errc::Syntax, std::string("expected '") + c + "' " + where, peek().pos);
    }
    take();
  }

  Token expect_ident(const std::string& what) {
    if (peek().kind != TokenKind::Ident) {
      fail(Errc::Syntax, "expected " + what, peek().pos);
    }
    return take();
  }

  std::vector<Token> ident_list(const std::string& where) {
    expect_punct('{', where);
    std::vector<Token> names;
    while (peek().kind == TokenKind::Ident) names.push_back(take());
    expect_punct('}', where);
    return names;
  }

  void parse_sections() {
    if (peek().kind != TokenKind::Ident || peek().text != "problem") {
      fail(Errc::Syntax, "expected 'problem'", peek().pos);
    }
    take();
    if (peek().kind != TokenKind::String) {
      fail(Errc::Syntax, "expected problem name string", peek().pos);
    }
    name_ = take().text;

    while (peek().kind != TokenKind::End) {
      const Token keyword = expect_ident("a section keyword");
      if (keyword.text == "chance" || keyword.text == "decision") {
        Variable var;
        var.kind =
            keyword.text == "chance" ? VariableKind::Chance : VariableKind::Decision;
        const Token name = expect_ident("a variable name");
        var.name = name.text;
        for (const Token& value : ident_list("in frame of '" + var.name + "'")) {
          var.frame.push_back(value.text);
        }
        if (var.frame.size() < 2) {
          fail(Errc::BadFrame, "variable '" + var.name + "' needs at least 2 frame values",
               name.pos);
        }
        std::vector<Token> observes;
        if (peek().kind == TokenKind::Ident && peek().text == "observes") {
          if (var.kind != VariableKind::Decision) {
            fail(Errc::Syntax, "only decision variables observe", peek().pos);
          }
          take();
          observes = ident_list("in observes clause of '" + var.name + "'");
        }
        variables_.push_back(std::move(var));
        observes_.push_back(std::move(observes));
        declared_at_.push_back(name.pos);
      } else if (keyword.text == "cpt") {
        RawCpt cpt;
        cpt.child = expect_ident("a chance variable name after 'cpt'");
        if (at_punct('|')) {
          take();
          while (peek().kind == TokenKind::Ident) cpt.parents.push_back(take());
          if (cpt.parents.empty()) {
            fail(Errc::Syntax, "expected parent names after '|'", peek().pos);
          }
        }
        expect_punct('{', "to open cpt rows");
        while (!at_punct('}')) {
          RawCptRow row;
          row.pos = peek().pos;
          while (peek().kind == TokenKind::Ident) row.parent_values.push_back(take());
          expect_punct(':', "between parent values and probabilities");
          while (peek().kind == TokenKind::Number) row.probabilities.push_back(take());
          if (row.probabilities.empty()) {
            fail(Errc::Syntax, "expected probabilities after ':'", peek().pos);
          }
          cpt.rows.push_back(std::move(row));
        }
        expect_punct('}', "to close cpt rows");
        cpts_.push_back(std::move(cpt));
      } else if (keyword.text == "utility") {
        if (utility_) fail(Errc::Syntax, "duplicate utility section", keyword.pos);
        RawUtility utility;
        utility.pos = keyword.pos;
        utility.scope = ident_list("in utility scope");
        expect_punct('{', "to open utility rows");
        while (!at_punct('}')) {
          RawUtilityRow row;
          row.pos = peek().pos;
          while (peek().kind == TokenKind::Ident) row.values.push_back(take());
          expect_punct(':', "between values and the utility");
          if (peek().kind != TokenKind::Number) {
            fail(Errc::Syntax, "expected one utility number per row", peek().pos);
          }
          row.value_number = take();
          if (peek().kind == TokenKind::Number) {
            fail(Errc::Syntax, "expected one utility number per row", peek().pos);
          }
          utility.rows.push_back(std::move(row));
        }
        expect_punct('}', "to close utility rows");
        utility_ = std::move(utility);
      } else if (keyword.text == "order") {
        if (!order_.empty()) fail(Errc::Syntax, "duplicate order section", keyword.pos);
        order_ = ident_list("in order section");
        if (order_.empty()) fail(Errc::Syntax, "order section must name variables", keyword.pos);
      } else {
        fail(Errc::Syntax, "unknown section '" + keyword.text + "'", keyword.pos);
      }
    }
  }

  int variable_index(const Token& name) const {
    for (int i = 0; i < static_cast<int>(variables_.size()); ++i) {
      if (variables_[i].name == name.text) return i;
    }
    fail(Errc::UnknownVariable, "unknown variable '" + name.text + "'", name.pos);
  }

  int frame_value_index(const Variable& var, const Token& value) const {
    const int index = var.frame_index(value.text);
    if (index < 0) {
      fail(Errc::Syntax,
           "'" + value.text + "' is not a frame value of '" + var.name + "'", value.pos);
    }
    return index;
  }

  ValidatedProblem resolve() {
    ProblemDefinition def;
    def.name = name_;
    def.variables = variables_;
    def.observations.resize(variables_.size());
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      for (const Token& name : observes_[i]) {
        def.observations[i].push_back(variable_index(name));
      }
    }

    for (const RawCpt& raw : cpts_) {
      Cpt cpt;
      cpt.child = variable_index(raw.child);
      const Variable& child = def.variables[cpt.child];
      for (const Token& parent : raw.parents) cpt.parents.push_back(variable_index(parent));
      const std::int64_t n_rows = frame_product(cpt.parents, def.variables);
      const auto width = static_cast<std::int64_t>(child.frame.size());
      cpt.rows.assign(n_rows * width, -1.0);
      for (const RawCptRow& row : raw.rows) {
        if (row.parent_values.size() != raw.parents.size()) {
          fail(Errc::Syntax,
               "cpt row for '" + child.name + "' needs one value per parent", row.pos);
        }
        if (static_cast<std::int64_t>(row.probabilities.size()) != width) {
          fail(Errc::Syntax,
               "cpt row for '" + child.name + "' needs " + std::to_string(width) +
                   " probabilities, got " + std::to_string(row.probabilities.size()),
               row.pos);
        }
        std::int64_t code = 0;
        for (std::size_t i = 0; i < cpt.parents.size(); ++i) {
          const Variable& parent = def.variables[cpt.parents[i]];
          code = code * static_cast<std::int64_t>(parent.frame.size()) +
                 frame_value_index(parent, row.parent_values[i]);
        }
        if (cpt.rows[code * width] >= 0.0) {
          fail(Errc::Syntax, "duplicate cpt row for '" + child.name + "'", row.pos);
        }
        double sum = 0.0;
        for (std::int64_t i = 0; i < width; ++i) {
          const double p = row.probabilities[i].number;
          if (p < 0.0 || p > 1.0) {
            fail(Errc::ProbabilityRange, "probability outside [0,1]",
                 row.probabilities[i].pos);
          }
          cpt.rows[code * width + i] = p;
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
          fail(Errc::CptRowSum,
               "cpt row for '" + child.name + "' sums to " + std::to_string(sum), row.pos);
        }
      }
      for (std::int64_t r = 0; r < n_rows; ++r) {
        if (cpt.rows[r * width] < 0.0) {
          fail(Errc::MissingRow, "cpt for '" + child.name + "' is missing a row",
               raw.child.pos);
        }
      }
      def.cpts.push_back(std::move(cpt));
    }

    if (!utility_) fail(Errc::UtilityIncomplete, "missing utility section");
    for (const Token& name : utility_->scope) {
      def.utility.scope.push_back(variable_index(name));
    }
    const std::int64_t entries = frame_product(def.utility.scope, def.variables);
    def.utility.entries.assign(entries, 0.0);
    std::vector<char> filled(entries, 0);
    for (const RawUtilityRow& row : utility_->rows) {
      if (row.values.size() != def.utility.scope.size()) {
        fail(Errc::Syntax, "utility row needs one value per scope variable", row.pos);
      }
      std::int64_t code = 0;
      for (std::size_t i = 0; i < row.values.size(); ++i) {
        const Variable& var = def.variables[def.utility.scope[i]];
        code = code * static_cast<std::int64_t>(var.frame.size()) +
               frame_value_index(var, row.values[i]);
      }
      if (filled[code]) {
        fail(Errc::UtilityIncomplete, "duplicate utility entry", row.pos);
      }
      filled[code] = 1;
      def.utility.entries[code] = row.value_number.number;
    }
    if (std::count(filled.begin(), filled.end(), char(1)) != entries) {
      fail(Errc::UtilityIncomplete,
           "utility table is missing " +
               std::to_string(entries - std::count(filled.begin(), filled.end(), char(1))) +
               " entries",
           utility_->pos);
    }

    for (const Token& name : order_) def.causal_order.push_back(variable_index(name));
    return validate_problem(std::move(def));
  }

  std::vector<Token> tokens_;
  std::size_t at_ = 0;
  std::string name_;
  std::vector<Variable> variables_;
  std::vector<std::vector<Token>> observes_;
  std::vector<SourcePos> declared_at_;
  std::vector<RawCpt> cpts_;
  std::optional<RawUtility> utility_;
  std::vector<Token> order_;
};

std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  // Trim to the shortest representation that round-trips.
  for (int precision = 1; precision < 17; ++precision) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", precision, value);
    if (std::strtod(shorter, nullptr) == value) return shorter;
  }
  return buffer;
}

std::string format_fixed4(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

}  // namespace

ValidatedProblem parse_problem(std::string_view text) {
  return Parser(Lexer(text).run()).run();
}

std::string render_problem(const ProblemDefinition& def) {
  std::ostringstream out;
  out << "problem \"" << def.name << "\"\n\n";
  for (std::size_t i = 0; i < def.variables.size(); ++i) {
    const Variable& var = def.variables[i];
    out << (var.kind == VariableKind::Chance ? "chance " : "decision ") << var.name << " {";
    for (const auto& value : var.frame) out << " " << value;
    out << " }";
    if (var.kind == VariableKind::Decision && i < def.observations.size() &&
        !def.observations[i].empty()) {
      out << " observes {";
      for (int o : def.observations[i]) out << " " << def.variables[o].name;
      out << " }";
    }
    out << "\n";
  }
  for (const Cpt& cpt : def.cpts) {
    const Variable& child = def.variables[cpt.child];
    out << "\ncpt " << child.name;
    if (!cpt.parents.empty()) {
      out << " |";
      for (int p : cpt.parents) out << " " << def.variables[p].name;
    }
    out << " {\n";
    const std::int64_t n_rows = frame_product(cpt.parents, def.variables);
    const auto width = static_cast<std::int64_t>(child.frame.size());
    std::vector<int> digits(cpt.parents.size(), 0);
    for (std::int64_t r = 0; r < n_rows; ++r) {
      out << " ";
      std::int64_t rem = r;
      for (int i = static_cast<int>(cpt.parents.size()) - 1; i >= 0; --i) {
        const Variable& parent = def.variables[cpt.parents[i]];
        digits[i] = static_cast<int>(rem % parent.frame.size());
        rem /= parent.frame.size();
      }
      for (std::size_t i = 0; i < cpt.parents.size(); ++i) {
        out << " " << def.variables[cpt.parents[i]].frame[digits[i]];
      }
      out << " :";
      for (std::int64_t v = 0; v < width; ++v) {
        out << " " << format_real(cpt.rows[r * width + v]);
      }
      out << "\n";
    }
    out << "}\n";
  }
  out << "\nutility {";
  for (int v : def.utility.scope) out << " " << def.variables[v].name;
  out << " } {\n";
  {
    const std::int64_t entries = static_cast<std::int64_t>(def.utility.entries.size());
    std::vector<int> digits(def.utility.scope.size(), 0);
    for (std::int64_t code = 0; code < entries; ++code) {
      std::int64_t rem = code;
      for (int i = static_cast<int>(def.utility.scope.size()) - 1; i >= 0; --i) {
        const Variable& var = def.variables[def.utility.scope[i]];
        digits[i] = static_cast<int>(rem % var.frame.size());
        rem /= var.frame.size();
      }
      out << " ";
      for (std::size_t i = 0; i < def.utility.scope.size(); ++i) {
        out << " " << def.variables[def.utility.scope[i]].frame[digits[i]];
      }
      out << " : " << format_real(def.utility.entries[code]) << "\n";
    }
  }
  out << "}\n";
  if (!def.causal_order.empty()) {
    out << "\norder {";
    for (int v : def.causal_order) out << " " << def.variables[v].name;
    out << " }\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// DOT export.

std::string export_dot(const Tree& tree, const Solution* solution) {
  std::map<NodeId, double> pruned_value;
  if (solution) {
    for (const NodeTrace& trace : solution->node_traces) {
      pruned_value[trace.node] = trace.value;
    }
  }

  std::ostringstream out;
  out << "digraph tree {\n";
  out << "  rankdir=LR;\n";
  out << "  node [fontsize=10];\n";

  std::vector<char> emitted(tree.nodes.size(), 0);
  auto emit_node = [&](NodeId id) {
    if (emitted[id]) return;
    emitted[id] = 1;
    const TreeNode& node = tree.nodes[id];
    std::string label;
    std::string shape;
    switch (node.kind) {
      case NodeKind::Decision:
        shape = "box";
        label = tree.variables[node.variable].name;
        break;
      case NodeKind::Chance:
        shape = "circle";
        label = tree.variables[node.variable].name;
        break;
      case NodeKind::Leaf:
        shape = "diamond";
        label = format_fixed4(node.utility);
        if (node.path_probability) {
          label += "\\np=" + format_fixed4(*node.path_probability);
        }
        break;
    }
    if (const auto it = pruned_value.find(id); it != pruned_value.end()) {
      label += "\\n=" + format_fixed4(it->second);
    }
    out << "  n" << id << " [shape=" << shape << ", label=\"" << label << "\"];\n";
  };

  std::vector<char> visited(tree.nodes.size(), 0);
  auto walk = [&](auto&& self, NodeId id) -> void {
    if (visited[id]) return;
    visited[id] = 1;
    emit_node(id);
    const TreeNode& node = tree.nodes[id];
    for (const Edge& edge : node.edges) {
      emit_node(edge.child);
      std::string label = tree.variables[node.variable].frame[edge.value];
      if (edge.probability) label += ":" + format_fixed4(*edge.probability);
      bool chosen = false;
      if (solution && node.kind == NodeKind::Decision && node.info_set >= 0 &&
          node.info_set < static_cast<int>(solution->strategy.choices.size())) {
        chosen = solution->strategy.choices[node.info_set] == edge.value;
      }
      out << "  n" << id << " -> n" << edge.child << " [label=\"" << label << "\"";
      if (chosen) out << ", style=bold, penwidth=2";
      out << "];\n";
      self(self, edge.child);
    }
  };
  walk(walk, tree.root);

  int cluster = 0;
  for (const InformationSet& set : tree.information_sets) {
    if (set.members.size() < 2) continue;
    out << "  subgraph cluster_" << cluster++ << " {\n";
    out << "    style=dashed;\n";
    out << "    label=\"" << set.id << "\";\n";
    out << "   ";
    for (NodeId member : set.members) out << " n" << member << ";";
    out << "\n  }\n";
  }
  out << "}\n";
  return out.str();
}

std::string render_ops(const CostReport& report) {
  std::ostringstream out;
  out << "ops: representation=" << report.representation.total()
      << " solution=" << report.solution.total() << " total=" << report.total();
  return out.str();
}

std::string render_strategy_line(const Solution& solution,
                                 const std::vector<Variable>& variables) {
  std::ostringstream out;
  out << "strategy:";
  const auto assignment = solution.strategy_assignment(variables);
  if (assignment.empty()) out << " (none)";
  for (const auto& [id, value] : assignment) out << " " << id << "=" << value;
  return out.str();
}

}  // namespace dtsolve
