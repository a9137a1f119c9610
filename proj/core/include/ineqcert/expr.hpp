#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ineqcert/jet.hpp"

namespace ineqcert {

using ConstantMap = std::map<std::string, double, std::less<>>;

/// Value, gradient, Hessian and Laplacian of a potential at one point.
/// Entries beyond `dim` are zero.
struct JetValue {
  int dim = 1;
  double value = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
  double laplacian = 0.0;

  Eigen::VectorXd grad() const { return gradient.head(dim); }
  Eigen::MatrixXd hess() const { return hessian.topLeftCorner(dim, dim); }
};

enum class Func { Sin, Cos, Exp, Log, Sqrt, Abs, Cosh, Sinh, Tanh };

namespace detail {

// Postfix instruction of a compiled expression.
struct Instr {
  enum class Op { Number, Var, Radius, Angle, Add, Sub, Mul, Div, Neg, PowConst, Pow, Call };
  Op op;
  double number = 0.0;
  int index = 0;
  Func func = Func::Sin;
};

}  // namespace detail

/// A parsed potential V over x1..xd (plus polar symbols r, theta).
///
/// Immutable after construction; constants are folded in at parse time, so
/// copies are cheap and evaluation is safe from any number of threads.
class PotentialSpec {
 public:
  int dim() const noexcept { return dim_; }
  const std::string& source() const noexcept { return source_; }
  const ConstantMap& constants() const noexcept { return constants_; }

  /// True if the expression references r or theta (singular at the origin).
  bool uses_polar() const noexcept { return uses_polar_; }
  bool uses_angle() const noexcept { return uses_angle_; }

  /// Throws DomainError where a partial function is undefined.
  double value(std::span<const double> x) const;
  JetValue jet(std::span<const double> x) const;
  Jet raw_jet(std::span<const double> x) const;

  /// Polynomial growth degree of |V| as |x| -> infinity, read off the tree
  /// (bounded functions count as degree 0). Empty when undetermined, e.g.
  /// for exp of a growing argument or cancellations between terms.
  std::optional<double> growth_degree() const;

 private:
  friend PotentialSpec parse(std::string_view, int, const ConstantMap&);

  int dim_ = 1;
  std::string source_;
  ConstantMap constants_;
  bool uses_polar_ = false;
  bool uses_angle_ = false;
  std::shared_ptr<const std::vector<detail::Instr>> program_;
};

/// Parses `source` in the potential mini-language.
///
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := ('+'|'-') unary | power
///   power  := base ('^' unary)?
///   base   := number | ident | '(' expr ')' | func '(' expr ')'
///
/// func is one of sin cos exp log sqrt abs cosh sinh tanh; ident is x1..xd,
/// r, theta (d = 2 only), pi, e or a key of `constants`.
PotentialSpec parse(std::string_view source, int dim, const ConstantMap& constants = {});

}  // namespace ineqcert
