#include "sgc/vfcore/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <numbers>

namespace sgc {

namespace {

using Op = Expression::Op;
using Node = Expression::Node;

class Parser {
 public:
  Parser(std::string_view text, int n_vars) : s_(text), n_vars_(n_vars) {}

  std::vector<Expression> parse_list() {
    std::vector<Expression> out;
    while (true) {
      nodes_.clear();
      int root = parse_expr();
      out.emplace_back(nodes_, root);
      skip_ws();
      if (at_end()) break;
      if (s_[pos_] != ',') fail("expected ',' or end of input");
      ++pos_;
    }
    return out;
  }

  Expression parse_single() {
    int root = parse_expr();
    skip_ws();
    if (!at_end()) fail(s_[pos_] == ',' ? "unexpected ',' in scalar expression" : "unexpected trailing input");
    return Expression(nodes_, root);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }
  bool at_end() const { return pos_ >= s_.size(); }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  int add(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    while (true) {
      skip_ws();
      if (at_end() || (s_[pos_] != '+' && s_[pos_] != '-')) return lhs;
      Op op = s_[pos_] == '+' ? Op::Add : Op::Sub;
      ++pos_;
      int rhs = parse_term();
      lhs = add({op, 0.0, -1, lhs, rhs});
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    while (true) {
      skip_ws();
      if (at_end() || (s_[pos_] != '*' && s_[pos_] != '/')) return lhs;
      Op op = s_[pos_] == '*' ? Op::Mul : Op::Div;
      ++pos_;
      int rhs = parse_unary();
      lhs = add({op, 0.0, -1, lhs, rhs});
    }
  }

  int parse_unary() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    if (s_[pos_] == '-') {
      ++pos_;
      int a = parse_unary();
      return add({Op::Neg, 0.0, -1, a, -1});
    }
    if (s_[pos_] == '+') {
      ++pos_;
      return parse_unary();
    }
    return parse_primary();
  }

  int parse_primary() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      int e = parse_expr();
      skip_ws();
      if (at_end() || s_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string_view id = s_.substr(start, pos_ - start);
      if (id == "pi") return add({Op::Const, std::numbers::pi});
      if (id.size() >= 2 && id[0] == 'x' &&
          std::all_of(id.begin() + 1, id.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        int k = 0;
        std::from_chars(id.data() + 1, id.data() + id.size(), k);
        if (k < 1 || k > n_vars_) {
          pos_ = start;
          fail("variable '" + std::string(id) + "' out of range (dimension " + std::to_string(n_vars_) + ")");
        }
        return add({Op::Var, 0.0, k - 1});
      }
      Op op;
      if (id == "sin") op = Op::Sin;
      else if (id == "cos") op = Op::Cos;
      else if (id == "exp") op = Op::Exp;
      else if (id == "sqrt") op = Op::Sqrt;
      else {
        pos_ = start;
        fail("unknown identifier '" + std::string(id) + "'");
      }
      skip_ws();
      if (at_end() || s_[pos_] != '(') fail("expected '(' after function name");
      ++pos_;
      int a = parse_expr();
      skip_ws();
      if (at_end() || s_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return add({op, 0.0, -1, a, -1});
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (!at_end() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (!at_end() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (at_end() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        pos_ = save;
        fail("malformed exponent");
      }
      while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return add({Op::Const, v});
  }

  std::string_view s_;
  int n_vars_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    default: return 4;
  }
}

std::string format_number(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    if (back == v) break;
  }
  return buf;
}

std::string print(const std::vector<Node>& nodes, int i) {
  const Node& n = nodes[static_cast<std::size_t>(i)];
  auto wrap = [&](int child, bool paren) {
    std::string s = print(nodes, child);
    return paren ? "(" + s + ")" : s;
  };
  switch (n.op) {
    case Op::Const: {
      std::string s = format_number(std::abs(n.value));
      return n.value < 0 || std::signbit(n.value) ? "(-" + s + ")" : s;
    }
    case Op::Var: return "x" + std::to_string(n.var + 1);
    case Op::Neg: return "-" + wrap(n.lhs, precedence(nodes[n.lhs].op) < 3);
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      int p = precedence(n.op);
      const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
      bool lp = precedence(nodes[n.lhs].op) < p;
      // right operand of a non-commutative or same-level operator keeps its grouping
      bool rp = precedence(nodes[n.rhs].op) <= p && precedence(nodes[n.rhs].op) < 3;
      return wrap(n.lhs, lp) + sym + wrap(n.rhs, rp);
    }
    case Op::Sin: return "sin(" + print(nodes, n.lhs) + ")";
    case Op::Cos: return "cos(" + print(nodes, n.lhs) + ")";
    case Op::Exp: return "exp(" + print(nodes, n.lhs) + ")";
    case Op::Sqrt: return "sqrt(" + print(nodes, n.lhs) + ")";
  }
  return "";
}

}  // namespace

int Expression::max_variable() const {
  int m = 0;
  for (const auto& n : nodes_)
    if (n.op == Op::Var) m = std::max(m, n.var + 1);
  return m;
}

Expression parse_expression(std::string_view text, int n_vars) { return Parser(text, n_vars).parse_single(); }

std::vector<Expression> parse_components(std::string_view text, int n_vars) {
  return Parser(text, n_vars).parse_list();
}

std::string to_string(const Expression& e) { return print(e.nodes(), e.root()); }

ExpressionField::ExpressionField(std::vector<Expression> components, std::string name)
    : components_(std::move(components)), name_(std::move(name)) {
  for (const auto& c : components_)
    if (c.max_variable() > static_cast<int>(components_.size()))
      throw ConfigError("field '" + name_ + "' references a variable beyond its dimension");
}

std::shared_ptr<ExpressionField> ExpressionField::parse(const std::vector<std::string>& components,
                                                        std::string name) {
  const int n = static_cast<int>(components.size());
  std::vector<Expression> exprs;
  exprs.reserve(components.size());
  for (const auto& c : components) exprs.push_back(parse_expression(c, n));
  return std::make_shared<ExpressionField>(std::move(exprs), std::move(name));
}

std::vector<std::string> ExpressionField::component_strings() const {
  std::vector<std::string> out;
  for (const auto& c : components_) out.push_back(to_string(c));
  return out;
}

}  // namespace sgc
