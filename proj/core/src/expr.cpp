#include "ineqcert/expr.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ineqcert/error.hpp"

namespace ineqcert {
namespace {

using detail::Instr;
using Op = Instr::Op;

double radius_of(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return std::sqrt(s);
}

bool is_integer(double c) { return std::floor(c) == c && std::abs(c) < 1e9; }

// Scalar operations, overloaded on double and Jet so one stack machine serves both.
double d_pow_const(double a, double c) {
  if (a < 0.0 && !is_integer(c)) throw DomainError("non-integer power of a negative base");
  if (a == 0.0 && c < 0.0) throw DomainError("negative power of zero");
  return std::pow(a, c);
}

Jet d_pow_const(const Jet& a, double c) {
  if (c == 0.0) return Jet::constant(1.0);
  if (c == 1.0) return a;
  if (c == 2.0) return a * a;
  if (a.v < 0.0 && !is_integer(c)) throw DomainError("non-integer power of a negative base");
  if (a.v == 0.0 && c < 2.0) throw DomainError("power not twice differentiable at zero");
  const double f0 = std::pow(a.v, c);
  const double f1 = c * std::pow(a.v, c - 1.0);
  const double f2 = c * (c - 1.0) * std::pow(a.v, c - 2.0);
  return chain(a, f0, f1, f2);
}

double d_apply(Func f, double a) {
  switch (f) {
    case Func::Sin: return std::sin(a);
    case Func::Cos: return std::cos(a);
    case Func::Exp: return std::exp(a);
    case Func::Log:
      if (a <= 0.0) throw DomainError("log of nonpositive argument");
      return std::log(a);
    case Func::Sqrt:
      if (a < 0.0) throw DomainError("sqrt of negative argument");
      return std::sqrt(a);
    case Func::Abs: return std::abs(a);
    case Func::Cosh: return std::cosh(a);
    case Func::Sinh: return std::sinh(a);
    case Func::Tanh: return std::tanh(a);
  }
  return 0.0;
}

Jet d_apply(Func f, const Jet& a) {
  const double x = a.v;
  switch (f) {
    case Func::Sin: {
      const double s = std::sin(x), c = std::cos(x);
      return chain(a, s, c, -s);
    }
    case Func::Cos: {
      const double s = std::sin(x), c = std::cos(x);
      return chain(a, c, -s, -c);
    }
    case Func::Exp: {
      const double e = std::exp(x);
      return chain(a, e, e, e);
    }
    case Func::Log:
      if (x <= 0.0) throw DomainError("log of nonpositive argument");
      return chain(a, std::log(x), 1.0 / x, -1.0 / (x * x));
    case Func::Sqrt: {
      if (x <= 0.0) throw DomainError("sqrt is not differentiable at nonpositive arguments");
      const double s = std::sqrt(x);
      return chain(a, s, 0.5 / s, -0.25 / (s * x));
    }
    case Func::Abs: {
      const double sg = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      return chain(a, std::abs(x), sg, 0.0);
    }
    case Func::Cosh: return chain(a, std::cosh(x), std::sinh(x), std::cosh(x));
    case Func::Sinh: return chain(a, std::sinh(x), std::cosh(x), std::sinh(x));
    case Func::Tanh: {
      const double t = std::tanh(x);
      const double s = 1.0 - t * t;
      return chain(a, t, s, -2.0 * t * s);
    }
  }
  return a;
}

double d_pow(double a, double b) {
  if (a <= 0.0) throw DomainError("variable exponent requires a positive base");
  return std::exp(b * std::log(a));
}

Jet d_pow(const Jet& a, const Jet& b) {
  if (a.v <= 0.0) throw DomainError("variable exponent requires a positive base");
  return d_apply(Func::Exp, b * d_apply(Func::Log, a));
}

double d_div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return a / b;
}

Jet d_div(const Jet& a, const Jet& b) {
  if (b.v == 0.0) throw DomainError("division by zero");
  return a / b;
}

double make_var(std::span<const double> x, int i, double) { return x[i]; }
Jet make_var(std::span<const double> x, int i, Jet) { return Jet::variable(x[i], i); }
double make_const(double c, double) { return c; }
Jet make_const(double c, Jet) { return Jet::constant(c); }

double make_radius(std::span<const double> x, double) {
  const double r = radius_of(x);
  if (r == 0.0) throw DomainError("polar symbol evaluated at the origin");
  return r;
}

Jet make_radius(std::span<const double> x, Jet) {
  const double r = radius_of(x);
  if (r == 0.0) throw DomainError("polar symbol evaluated at the origin");
  Jet j;
  j.v = r;
  const int d = static_cast<int>(x.size());
  for (int p = 0; p < d; ++p) j.g[p] = x[p] / r;
  for (int p = 0; p < d; ++p)
    for (int q = p; q < d; ++q) j.h[Jet::packed(p, q)] = ((p == q ? 1.0 : 0.0) - x[p] * x[q] / (r * r)) / r;
  return j;
}

double make_angle(std::span<const double> x, double) {
  if (x[0] == 0.0 && x[1] == 0.0) throw DomainError("polar symbol evaluated at the origin");
  return std::atan2(x[1], x[0]);
}

Jet make_angle(std::span<const double> x, Jet) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  if (r2 == 0.0) throw DomainError("polar symbol evaluated at the origin");
  Jet j;
  j.v = std::atan2(x[1], x[0]);
  j.g[0] = -x[1] / r2;
  j.g[1] = x[0] / r2;
  const double r4 = r2 * r2;
  j.h[Jet::packed(0, 0)] = 2.0 * x[0] * x[1] / r4;
  j.h[Jet::packed(1, 1)] = -2.0 * x[0] * x[1] / r4;
  j.h[Jet::packed(0, 1)] = (x[1] * x[1] - x[0] * x[0]) / r4;
  return j;
}

template <typename T>
T run(const std::vector<Instr>& program, std::span<const double> x) {
  // Expressions are shallow; a small local stack avoids allocation churn.
  std::vector<T> stack;
  stack.reserve(16);
  for (const Instr& in : program) {
    switch (in.op) {
      case Op::Number: stack.push_back(make_const(in.number, T{})); break;
      case Op::Var: stack.push_back(make_var(x, in.index, T{})); break;
      case Op::Radius: stack.push_back(make_radius(x, T{})); break;
      case Op::Angle: stack.push_back(make_angle(x, T{})); break;
      case Op::Neg: stack.back() = -stack.back(); break;
      case Op::Call: stack.back() = d_apply(in.func, stack.back()); break;
      case Op::PowConst: stack.back() = d_pow_const(stack.back(), in.number); break;
      default: {
        T b = stack.back();
        stack.pop_back();
        T& a = stack.back();
        switch (in.op) {
          case Op::Add: a = a + b; break;
          case Op::Sub: a = a - b; break;
          case Op::Mul: a = a * b; break;
          case Op::Div: a = d_div(a, b); break;
          case Op::Pow: a = d_pow(a, b); break;
          default: break;
        }
      }
    }
  }
  return stack.back();
}

void check_point(std::span<const double> x, int dim) {
  if (static_cast<int>(x.size()) != dim)
    throw InputError("point has " + std::to_string(x.size()) + " coordinates, expected " + std::to_string(dim));
  for (double xi : x)
    if (!std::isfinite(xi)) throw DomainError("non-finite evaluation point");
}

}  // namespace

double PotentialSpec::value(std::span<const double> x) const {
  check_point(x, dim_);
  const double v = run<double>(*program_, x);
  if (!std::isfinite(v)) throw DomainError("potential is not finite at the evaluation point");
  return v;
}

Jet PotentialSpec::raw_jet(std::span<const double> x) const {
  check_point(x, dim_);
  Jet j = run<Jet>(*program_, x);
  bool finite = std::isfinite(j.v);
  for (double g : j.g) finite = finite && std::isfinite(g);
  for (double h : j.h) finite = finite && std::isfinite(h);
  if (!finite) throw DomainError("potential derivatives are not finite at the evaluation point");
  return j;
}

JetValue PotentialSpec::jet(std::span<const double> x) const {
  const Jet j = raw_jet(x);
  JetValue out;
  out.dim = dim_;
  out.value = j.v;
  for (int p = 0; p < dim_; ++p) {
    out.gradient[p] = j.g[p];
    for (int q = 0; q < dim_; ++q) out.hessian(p, q) = j.hess(p, q);
  }
  out.laplacian = out.hessian.trace();
  return out;
}

std::optional<double> PotentialSpec::growth_degree() const {
  std::vector<std::optional<double>> st;
  for (const Instr& in : *program_) {
    switch (in.op) {
      case Op::Number: st.push_back(0.0); break;
      case Op::Var:
      case Op::Radius: st.push_back(1.0); break;
      case Op::Angle: st.push_back(0.0); break;
      case Op::Neg: break;
      case Op::PowConst:
        if (st.back()) st.back() = *st.back() * in.number;
        break;
      case Op::Call: {
        auto& a = st.back();
        if (!a) break;
        switch (in.func) {
          case Func::Sin:
          case Func::Cos:
          case Func::Tanh:
          case Func::Log: a = 0.0; break;
          case Func::Sqrt: a = *a / 2.0; break;
          case Func::Abs: break;
          case Func::Exp:
          case Func::Cosh:
          case Func::Sinh:
            if (*a > 0.0) a.reset();
            break;
        }
        break;
      }
      default: {
        auto b = st.back();
        st.pop_back();
        auto& a = st.back();
        if (!a || !b) {
          a.reset();
          break;
        }
        switch (in.op) {
          case Op::Add:
          case Op::Sub: a = std::max(*a, *b); break;
          case Op::Mul: a = *a + *b; break;
          case Op::Div: a = *a - *b; break;
          case Op::Pow: a.reset(); break;
          default: break;
        }
      }
    }
  }
  return st.back();
}

}  // namespace ineqcert
