#ifndef EINLAB_EXPR_HPP
#define EINLAB_EXPR_HPP

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "einlab/jet.hpp"

namespace einlab {

/// Restricted expression grammar for user-supplied charts:
/// +, -, *, /, pow (also ^), sin, cos, sinh, cosh, exp, sqrt, numeric
/// literals, the constant pi, and named variables.
struct ExprNode {
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Sinh, Cosh, Exp, Sqrt };
  Kind kind;
  double value = 0.0;  // Const
  int var = -1;        // Var
  std::shared_ptr<const ExprNode> a, b;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

inline ExprPtr expr_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Const;
  n->value = v;
  return n;
}
inline ExprPtr expr_var(int i) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Var;
  n->var = i;
  return n;
}
inline ExprPtr expr_node(ExprNode::Kind k, ExprPtr a, ExprPtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

template <class T>
T expr_eval(const ExprPtr& e, const std::vector<T>& vars) {
  using K = ExprNode::Kind;
  switch (e->kind) {
    case K::Const: return T(e->value);
    case K::Var:
      if (e->var < 0 || e->var >= static_cast<int>(vars.size()))
        throw std::out_of_range("expression variable index");
      return vars[e->var];
    case K::Add: return expr_eval(e->a, vars) + expr_eval(e->b, vars);
    case K::Sub: return expr_eval(e->a, vars) - expr_eval(e->b, vars);
    case K::Mul: return expr_eval(e->a, vars) * expr_eval(e->b, vars);
    case K::Div: return expr_eval(e->a, vars) / expr_eval(e->b, vars);
    case K::Neg: return -expr_eval(e->a, vars);
    case K::Pow: {
      if (e->b->kind != ExprNode::Kind::Const)
        throw std::invalid_argument("pow: exponent must be a numeric literal");
      return pow(expr_eval(e->a, vars), e->b->value);
    }
    case K::Sin: return sin(expr_eval(e->a, vars));
    case K::Cos: return cos(expr_eval(e->a, vars));
    case K::Sinh: return sinh(expr_eval(e->a, vars));
    case K::Cosh: return cosh(expr_eval(e->a, vars));
    case K::Exp: return exp(expr_eval(e->a, vars));
    case K::Sqrt: return sqrt(expr_eval(e->a, vars));
  }
  throw std::logic_error("unreachable");
}

inline double expr_eval_d(const ExprPtr& e, const std::vector<double>& vars) {
  using K = ExprNode::Kind;
  switch (e->kind) {
    case K::Const: return e->value;
    case K::Var: return vars.at(e->var);
    case K::Add: return expr_eval_d(e->a, vars) + expr_eval_d(e->b, vars);
    case K::Sub: return expr_eval_d(e->a, vars) - expr_eval_d(e->b, vars);
    case K::Mul: return expr_eval_d(e->a, vars) * expr_eval_d(e->b, vars);
    case K::Div: return expr_eval_d(e->a, vars) / expr_eval_d(e->b, vars);
    case K::Neg: return -expr_eval_d(e->a, vars);
    case K::Pow: return std::pow(expr_eval_d(e->a, vars), e->b->value);
    case K::Sin: return std::sin(expr_eval_d(e->a, vars));
    case K::Cos: return std::cos(expr_eval_d(e->a, vars));
    case K::Sinh: return std::sinh(expr_eval_d(e->a, vars));
    case K::Cosh: return std::cosh(expr_eval_d(e->a, vars));
    case K::Exp: return std::exp(expr_eval_d(e->a, vars));
    case K::Sqrt: return std::sqrt(expr_eval_d(e->a, vars));
  }
  throw std::logic_error("unreachable");
}

/// Symbolic partial derivative; used to supply exact chart derivatives for
/// user curves and position-only charts.
inline ExprPtr expr_derivative(const ExprPtr& e, int var) {
  using K = ExprNode::Kind;
  auto D = [var](const ExprPtr& x) { return expr_derivative(x, var); };
  switch (e->kind) {
    case K::Const: return expr_const(0.0);
    case K::Var: return expr_const(e->var == var ? 1.0 : 0.0);
    case K::Add: return expr_node(K::Add, D(e->a), D(e->b));
    case K::Sub: return expr_node(K::Sub, D(e->a), D(e->b));
    case K::Mul:
      return expr_node(K::Add, expr_node(K::Mul, D(e->a), e->b),
                       expr_node(K::Mul, e->a, D(e->b)));
    case K::Div:
      return expr_node(
          K::Div,
          expr_node(K::Sub, expr_node(K::Mul, D(e->a), e->b),
                    expr_node(K::Mul, e->a, D(e->b))),
          expr_node(K::Mul, e->b, e->b));
    case K::Neg: return expr_node(K::Neg, D(e->a));
    case K::Pow: {
      double p = e->b->value;
      return expr_node(K::Mul, expr_const(p),
                       expr_node(K::Mul, expr_node(K::Pow, e->a, expr_const(p - 1.0)),
                                 D(e->a)));
    }
    case K::Sin: return expr_node(K::Mul, expr_node(K::Cos, e->a), D(e->a));
    case K::Cos:
      return expr_node(K::Neg, expr_node(K::Mul, expr_node(K::Sin, e->a), D(e->a)));
    case K::Sinh: return expr_node(K::Mul, expr_node(K::Cosh, e->a), D(e->a));
    case K::Cosh: return expr_node(K::Mul, expr_node(K::Sinh, e->a), D(e->a));
    case K::Exp: return expr_node(K::Mul, e, D(e->a));
    case K::Sqrt:
      return expr_node(K::Div, D(e->a),
                       expr_node(K::Mul, expr_const(2.0), e));
  }
  throw std::logic_error("unreachable");
}

/// Recursive-descent parser over the restricted grammar. Variable names are
/// matched against `var_names` (e.g. {"u1","u2"}).
class ExprParser {
 public:
  ExprParser(std::string src, std::vector<std::string> var_names)
      : src_(std::move(src)), vars_(std::move(var_names)) {}

  ExprPtr parse() {
    pos_ = 0;
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size())
      throw std::invalid_argument("expression: trailing characters at '" +
                                  src_.substr(pos_) + "'");
    return e;
  }

 private:
  std::string src_;
  std::vector<std::string> vars_;
  size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_term();
    while (true) {
      if (eat('+')) e = expr_node(ExprNode::Kind::Add, e, parse_term());
      else if (eat('-')) e = expr_node(ExprNode::Kind::Sub, e, parse_term());
      else return e;
    }
  }
  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    while (true) {
      if (eat('*')) e = expr_node(ExprNode::Kind::Mul, e, parse_unary());
      else if (eat('/')) e = expr_node(ExprNode::Kind::Div, e, parse_unary());
      else return e;
    }
  }
  ExprPtr parse_unary() {
    if (eat('-')) return expr_node(ExprNode::Kind::Neg, parse_unary());
    if (eat('+')) return parse_unary();
    return parse_power();
  }
  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (eat('^')) {
      ExprPtr e = parse_unary();  // right associative
      return expr_node(ExprNode::Kind::Pow, base, fold_const(e));
    }
    return base;
  }

  ExprPtr fold_const(const ExprPtr& e) {
    // exponents must reduce to literals
    if (e->kind == ExprNode::Kind::Const) return e;
    if (e->kind == ExprNode::Kind::Neg && e->a->kind == ExprNode::Kind::Const)
      return expr_const(-e->a->value);
    throw std::invalid_argument("expression: exponent must be a numeric literal");
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (eat('(')) {
      ExprPtr e = parse_sum();
      if (!eat(')')) throw std::invalid_argument("expression: missing ')'");
      return e;
    }
    if (pos_ < src_.size() &&
        (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
      size_t end;
      double v = std::stod(src_.substr(pos_), &end);
      pos_ += end;
      return expr_const(v);
    }
    // identifier
    size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    if (start == pos_) throw std::invalid_argument("expression: unexpected character");
    std::string id = src_.substr(start, pos_ - start);
    if (id == "pi") return expr_const(M_PI);
    for (size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == id) return expr_var(static_cast<int>(i));

    using K = ExprNode::Kind;
    K kind;
    if (id == "sin") kind = K::Sin;
    else if (id == "cos") kind = K::Cos;
    else if (id == "sinh") kind = K::Sinh;
    else if (id == "cosh") kind = K::Cosh;
    else if (id == "exp") kind = K::Exp;
    else if (id == "sqrt") kind = K::Sqrt;
    else if (id == "pow") {
      if (!eat('(')) throw std::invalid_argument("pow: expected '('");
      ExprPtr a = parse_sum();
      if (!eat(',')) throw std::invalid_argument("pow: expected ','");
      ExprPtr b = parse_sum();
      if (!eat(')')) throw std::invalid_argument("pow: expected ')'");
      return expr_node(K::Pow, a, fold_const(b));
    } else {
      throw std::invalid_argument("expression: unknown identifier '" + id + "'");
    }
    if (!eat('(')) throw std::invalid_argument(id + ": expected '('");
    ExprPtr a = parse_sum();
    if (!eat(')')) throw std::invalid_argument(id + ": expected ')'");
    return expr_node(kind, a);
  }
};

inline ExprPtr parse_expression(const std::string& src,
                                const std::vector<std::string>& vars) {
  return ExprParser(src, vars).parse();
}

}  // namespace einlab

#endif
