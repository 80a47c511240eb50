#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sgc/vfcore/field.hpp"

namespace sgc {

// Expression tree stored as a flat arena. Grammar:
//   list    := expr (',' expr)*
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | primary
//   primary := number | 'x'<k> | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | sqrt
// Variables x1..xn are 1-based.
class Expression {
 public:
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Sin, Cos, Exp, Sqrt };

  struct Node {
    Op op;
    double value = 0.0;
    int var = -1;
    int lhs = -1;
    int rhs = -1;
  };

  Expression() = default;
  Expression(std::vector<Node> nodes, int root) : nodes_(std::move(nodes)), root_(root) {}

  template <class T>
  T eval(std::span<const T> x) const {
    return eval_node<T>(root_, x);
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }
  // Largest 1-based variable index referenced, 0 if none.
  int max_variable() const;

 private:
  template <class T>
  T eval_node(int i, std::span<const T> x) const {
    using std::cos;
    using std::exp;
    using std::sin;
    using std::sqrt;
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::Const: return T(n.value);
      case Op::Var: return x[static_cast<std::size_t>(n.var)];
      case Op::Neg: return -eval_node<T>(n.lhs, x);
      case Op::Add: return eval_node<T>(n.lhs, x) + eval_node<T>(n.rhs, x);
      case Op::Sub: return eval_node<T>(n.lhs, x) - eval_node<T>(n.rhs, x);
      case Op::Mul: return eval_node<T>(n.lhs, x) * eval_node<T>(n.rhs, x);
      case Op::Div: return eval_node<T>(n.lhs, x) / eval_node<T>(n.rhs, x);
      case Op::Sin: return sin(eval_node<T>(n.lhs, x));
      case Op::Cos: return cos(eval_node<T>(n.lhs, x));
      case Op::Exp: return exp(eval_node<T>(n.lhs, x));
      case Op::Sqrt: return sqrt(eval_node<T>(n.lhs, x));
    }
    return T(0.0);
  }

  std::vector<Node> nodes_;
  int root_ = -1;
};

// Parses one scalar expression over variables x1..x<n_vars>.
Expression parse_expression(std::string_view text, int n_vars);
// Parses a comma-separated list of component expressions.
std::vector<Expression> parse_components(std::string_view text, int n_vars);

// Canonical printer: minimal parentheses, numbers with round-trip precision.
std::string to_string(const Expression& e);

// Vector field whose components are parsed expressions.
class ExpressionField final : public TemplatedField<ExpressionField> {
 public:
  ExpressionField(std::vector<Expression> components, std::string name = "expression");
  static std::shared_ptr<ExpressionField> parse(const std::vector<std::string>& components,
                                                std::string name = "expression");

  std::size_t dim() const override { return components_.size(); }
  int dual_capacity() const override { return kMaxDualDepth; }
  std::string describe() const override { return name_; }
  const std::vector<Expression>& components() const { return components_; }
  std::vector<std::string> component_strings() const;

  template <class T>
  void apply(std::span<const T> x, std::span<T> out) const {
    for (std::size_t i = 0; i < components_.size(); ++i) {
      out[i] = components_[i].eval<T>(x);
      if (!std::isfinite(value_of(out[i])))
        throw DomainError("field '" + name_ + "' component " + std::to_string(i + 1) +
                          " is not finite at the evaluation point");
    }
  }

 private:
  std::vector<Expression> components_;
  std::string name_;
};

}  // namespace sgc
