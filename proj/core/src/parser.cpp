#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "ineqcert/error.hpp"
#include "ineqcert/expr.hpp"

namespace ineqcert {
namespace {

using detail::Instr;
using Op = Instr::Op;

struct Token {
  enum class Kind { Number, Ident, Symbol, End };
  Kind kind;
  std::string text;
  double number = 0.0;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char ch = src[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      // exponent part: 1e-3, 2E+5
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      double value = 0.0;
      const auto res = std::from_chars(src.data() + i, src.data() + j, value);
      if (res.ec != std::errc{} || res.ptr != src.data() + j)
        throw ParseError("malformed number '" + std::string(src.substr(i, j - i)) + "'", i);
      out.push_back({Token::Kind::Number, std::string(src.substr(i, j - i)), value, i});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Token::Kind::Ident, std::string(src.substr(i, j - i)), 0.0, i});
      i = j;
      continue;
    }
    if (std::string_view("+-*/^()").find(ch) != std::string_view::npos) {
      out.push_back({Token::Kind::Symbol, std::string(1, ch), 0.0, i});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + ch + "'", i);
  }
  out.push_back({Token::Kind::End, "", 0.0, src.size()});
  return out;
}

// Expression tree used only during parsing; folded and flattened into postfix.
struct Node {
  Op op;
  double number = 0.0;
  int index = 0;
  Func func = Func::Sin;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;
};
using NodePtr = std::unique_ptr<Node>;

NodePtr leaf(Op op, double number = 0.0, int index = 0) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->number = number;
  n->index = index;
  return n;
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

bool lookup_func(std::string_view name, Func& f) {
  static constexpr std::pair<std::string_view, Func> table[] = {
      {"sin", Func::Sin},   {"cos", Func::Cos},   {"exp", Func::Exp},
      {"log", Func::Log},   {"sqrt", Func::Sqrt}, {"abs", Func::Abs},
      {"cosh", Func::Cosh}, {"sinh", Func::Sinh}, {"tanh", Func::Tanh}};
  for (const auto& [n, fn] : table)
    if (n == name) {
      f = fn;
      return true;
    }
  return false;
}

class Parser {
 public:
  Parser(std::string_view src, int dim, const ConstantMap& constants)
      : tokens_(tokenize(src)), dim_(dim), constants_(constants) {}

  NodePtr parse_all() {
    auto e = expr();
    if (peek().kind != Token::Kind::End) throw ParseError("unexpected token '" + peek().text + "'", peek().pos);
    return e;
  }

  bool uses_polar = false;
  bool uses_angle = false;

 private:
  const Token& peek() const { return tokens_[cur_]; }
  const Token& take() { return tokens_[cur_++]; }
  bool accept(char sym) {
    if (peek().kind == Token::Kind::Symbol && peek().text[0] == sym) {
      ++cur_;
      return true;
    }
    return false;
  }
  void expect(char sym) {
    if (!accept(sym)) throw ParseError(std::string("expected '") + sym + "'", peek().pos);
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = binary(Op::Add, std::move(lhs), term());
      else if (accept('-'))
        lhs = binary(Op::Sub, std::move(lhs), term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = binary(Op::Mul, std::move(lhs), unary());
      else if (accept('/'))
        lhs = binary(Op::Div, std::move(lhs), unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_unique<Node>();
      n->op = Op::Neg;
      n->lhs = unary();
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto b = base();
    if (accept('^')) return binary(Op::Pow, std::move(b), unary());
    return b;
  }

  NodePtr base() {
    const Token& t = take();
    switch (t.kind) {
      case Token::Kind::Number:
        return leaf(Op::Number, t.number);
      case Token::Kind::Symbol:
        if (t.text == "(") {
          auto e = expr();
          expect(')');
          return e;
        }
        throw ParseError("unexpected '" + t.text + "'", t.pos);
      case Token::Kind::End:
        throw ParseError("unexpected end of input", t.pos);
      case Token::Kind::Ident:
        return ident(t);
    }
    throw ParseError("unreachable", t.pos);
  }

  NodePtr ident(const Token& t) {
    Func f;
    if (lookup_func(t.text, f)) {
      if (!accept('(')) throw ParseError("function '" + t.text + "' requires '('", peek().pos);
      auto n = std::make_unique<Node>();
      n->op = Op::Call;
      n->func = f;
      n->lhs = expr();
      expect(')');
      return n;
    }
    if (t.text.size() >= 2 && t.text[0] == 'x' &&
        t.text.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int idx = std::stoi(t.text.substr(1));
      if (idx >= 1 && idx <= dim_) return leaf(Op::Var, 0.0, idx - 1);
      throw ParseError("unknown identifier '" + t.text + "' for dimension " + std::to_string(dim_), t.pos);
    }
    if (t.text == "r") {
      uses_polar = true;
      return leaf(Op::Radius);
    }
    if (t.text == "theta") {
      if (dim_ != 2) throw ParseError("'theta' is only available in dimension 2", t.pos);
      uses_polar = true;
      uses_angle = true;
      return leaf(Op::Angle);
    }
    if (auto it = constants_.find(t.text); it != constants_.end()) return leaf(Op::Number, it->second);
    if (t.text == "pi") return leaf(Op::Number, std::numbers::pi);
    if (t.text == "e") return leaf(Op::Number, std::numbers::e);
    throw ParseError("unknown identifier '" + t.text + "'", t.pos);
  }

  std::vector<Token> tokens_;
  std::size_t cur_ = 0;
  int dim_;
  const ConstantMap& constants_;
};

double apply(Func f, double a) {
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

// Folds variable-free subtrees into numbers. Returns true if n is constant.
bool fold(Node& n) {
  switch (n.op) {
    case Op::Number: return true;
    case Op::Var:
    case Op::Radius:
    case Op::Angle: return false;
    default: break;
  }
  const bool lc = n.lhs ? fold(*n.lhs) : true;
  const bool rc = n.rhs ? fold(*n.rhs) : true;
  if (!(lc && rc)) return false;
  double v = 0.0;
  const double a = n.lhs->number;
  const double b = n.rhs ? n.rhs->number : 0.0;
  switch (n.op) {
    case Op::Add: v = a + b; break;
    case Op::Sub: v = a - b; break;
    case Op::Mul: v = a * b; break;
    case Op::Div: v = a / b; break;
    case Op::Neg: v = -a; break;
    case Op::Pow: v = std::pow(a, b); break;
    case Op::Call: v = apply(n.func, a); break;
    default: return false;
  }
  if (!std::isfinite(v)) throw DomainError("constant subexpression is not finite");
  n.op = Op::Number;
  n.number = v;
  n.lhs.reset();
  n.rhs.reset();
  return true;
}

void emit(const Node& n, std::vector<Instr>& out) {
  if (n.op == Op::Pow && n.rhs->op == Op::Number) {
    emit(*n.lhs, out);
    Instr in{Op::PowConst};
    in.number = n.rhs->number;
    out.push_back(in);
    return;
  }
  if (n.lhs) emit(*n.lhs, out);
  if (n.rhs) emit(*n.rhs, out);
  Instr in{n.op};
  in.number = n.number;
  in.index = n.index;
  in.func = n.func;
  out.push_back(in);
}

}  // namespace

PotentialSpec parse(std::string_view source, int dim, const ConstantMap& constants) {
  if (dim < 1 || dim > kMaxDim) throw ParameterError("dimension must be in 1.." + std::to_string(kMaxDim));
  Parser p(source, dim, constants);
  NodePtr root = p.parse_all();
  fold(*root);
  auto program = std::make_shared<std::vector<Instr>>();
  emit(*root, *program);

  PotentialSpec spec;
  spec.dim_ = dim;
  spec.source_ = std::string(source);
  spec.constants_ = constants;
  spec.uses_polar_ = p.uses_polar;
  spec.uses_angle_ = p.uses_angle;
  spec.program_ = std::move(program);
  return spec;
}

}  // namespace ineqcert
