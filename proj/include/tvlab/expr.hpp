#ifndef TVLAB_EXPR_HPP
#define TVLAB_EXPR_HPP

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "tvlab/dual.hpp"

namespace tvlab {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

class ArityError : public std::runtime_error {
public:
  explicit ArityError(const std::string& what) : std::runtime_error(what) {}
};

enum class UnaryFn { Sin, Cos, Exp, Log, Sqrt, Abs };

/// Immutable expression tree node. Variables refer to x1..xn (VarX) and
/// a1..ap (VarA) by zero-based index; Pow carries an integer exponent.
struct Expr {
  enum class Kind { Const, VarX, VarA, Add, Sub, Mul, Div, Pow, Neg, Fun };

  Kind kind;
  double cval = 0.0;
  int index = 0;
  int ipow = 0;
  UnaryFn fn = UnaryFn::Sin;
  std::shared_ptr<const Expr> lhs;
  std::shared_ptr<const Expr> rhs;
};

using ExprPtr = std::shared_ptr<const Expr>;

/// A mapping R^n x R^p -> R^l given by component expression trees.
/// Immutable after construction; evaluation and differentiation are pure.
class ExprMap {
public:
  ExprMap() = default;
  ExprMap(int arity_x, int arity_a, std::vector<ExprPtr> components)
      : arity_x_(arity_x), arity_a_(arity_a), components_(std::move(components)) {}

  int arity_x() const { return arity_x_; }
  int arity_a() const { return arity_a_; }
  int output_dim() const { return static_cast<int>(components_.size()); }
  const std::vector<ExprPtr>& components() const { return components_; }

  template <class T>
  std::vector<T> eval_generic(const std::vector<T>& x, const std::vector<T>& a) const;

private:
  int arity_x_ = 0;
  int arity_a_ = 0;
  std::vector<ExprPtr> components_;
};

/// Parses a semicolon- or bracket-separated list of component expressions.
ExprMap parse(const std::string& source, int arity_x, int arity_a);

/// Canonical text form; parse(print(m)) evaluates identically to m.
std::string print(const ExprMap& map);
std::string print_expr(const Expr& e);

enum class WithRespectTo { X, A, XA };

Eigen::VectorXd eval(const ExprMap& map, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& a = Eigen::VectorXd());

Eigen::MatrixXd jacobian(const ExprMap& map, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& a, WithRespectTo wrt);

/// Substitutes fixed parameter values, turning a family into its section F_a.
ExprMap bind_parameters(const ExprMap& map, const Eigen::VectorXd& a);

/// Hessians of each output component with respect to the state variables x.
std::vector<Eigen::MatrixXd> hessians(const ExprMap& map, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& a = Eigen::VectorXd());

template <class T>
T eval_node(const Expr& e, const std::vector<T>& x, const std::vector<T>& a) {
  switch (e.kind) {
    case Expr::Kind::Const: return T(e.cval);
    case Expr::Kind::VarX: return x[static_cast<std::size_t>(e.index)];
    case Expr::Kind::VarA: return a[static_cast<std::size_t>(e.index)];
    case Expr::Kind::Add: return eval_node(*e.lhs, x, a) + eval_node(*e.rhs, x, a);
    case Expr::Kind::Sub: return eval_node(*e.lhs, x, a) - eval_node(*e.rhs, x, a);
    case Expr::Kind::Mul: return eval_node(*e.lhs, x, a) * eval_node(*e.rhs, x, a);
    case Expr::Kind::Div: return checked_div(eval_node(*e.lhs, x, a), eval_node(*e.rhs, x, a));
    case Expr::Kind::Pow: return pow_int(eval_node(*e.lhs, x, a), e.ipow);
    case Expr::Kind::Neg: return -eval_node(*e.lhs, x, a);
    case Expr::Kind::Fun: {
      T arg = eval_node(*e.lhs, x, a);
      switch (e.fn) {
        case UnaryFn::Sin: return sin(arg);
        case UnaryFn::Cos: return cos(arg);
        case UnaryFn::Exp: return exp(arg);
        case UnaryFn::Log: return log(arg);
        case UnaryFn::Sqrt: return sqrt(arg);
        case UnaryFn::Abs: return abs(arg);
      }
    }
  }
  throw EvalError("corrupt expression node");
}

template <class T>
std::vector<T> ExprMap::eval_generic(const std::vector<T>& x, const std::vector<T>& a) const {
  if (static_cast<int>(x.size()) != arity_x_ || static_cast<int>(a.size()) != arity_a_)
    throw ArityError("evaluation point does not match map arity");
  std::vector<T> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(eval_node(*c, x, a));
  return out;
}

}  // namespace tvlab

#endif
