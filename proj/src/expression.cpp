#include "finsler/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "finsler/errors.hpp"

namespace finsler {

std::string_view to_string(Func f) {
  switch (f) {
    case Func::sqrt: return "sqrt";
    case Func::exp: return "exp";
    case Func::ln: return "ln";
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::abs: return "abs";
  }
  return "?";
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::pow: return "^";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Construction, printing, equality

Expression Expression::number(double v, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::number;
  n->number = v;
  n->offset = offset;
  return Expression(std::move(n));
}

Expression Expression::variable(Var v, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->var = v;
  n->offset = offset;
  return Expression(std::move(n));
}

Expression Expression::negate(const Expression& e, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::negate;
  n->lhs = e.root_;
  n->offset = offset;
  return Expression(std::move(n));
}

Expression Expression::function(Func f, const Expression& arg, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::function;
  n->func = f;
  n->lhs = arg.root_;
  n->offset = offset;
  return Expression(std::move(n));
}

Expression Expression::binary(BinaryOp op, const Expression& a, const Expression& b, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::binary;
  n->op = op;
  n->lhs = a.root_;
  n->rhs = b.root_;
  n->offset = offset;
  return Expression(std::move(n));
}

namespace {

using Node = Expression::Node;
using Kind = Expression::Kind;

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::number:
      if (std::signbit(n.number)) {
        out += "(-";
        out += format_number(-n.number);
        out += ')';
      } else {
        out += format_number(n.number);
      }
      return;
    case Kind::variable:
      out += n.var == Var::r ? 'r' : 's';
      return;
    case Kind::negate:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      return;
    case Kind::function:
      out += to_string(n.func);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
    case Kind::binary:
      out += '(';
      print(*n.lhs, out);
      out += to_string(n.op);
      print(*n.rhs, out);
      out += ')';
      return;
  }
}

bool equal(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::number: return a.number == b.number;
    case Kind::variable: return a.var == b.var;
    case Kind::negate: return equal(*a.lhs, *b.lhs);
    case Kind::function: return a.func == b.func && equal(*a.lhs, *b.lhs);
    case Kind::binary: return a.op == b.op && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
  return false;
}

std::string node_text(const Node& n) {
  std::string out;
  print(n, out);
  return out;
}

}  // namespace

std::string Expression::str() const {
  std::string out;
  print(*root_, out);
  return out;
}

bool operator==(const Expression& a, const Expression& b) { return equal(*a.root_, *b.root_); }

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression run() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    Expression e = expr();
    skip_space();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
      throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    }
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail_expected(const char* what) {
    if (pos_ >= text_.size()) throw ParseError(std::string("expected ") + what + ", found end of input", pos_);
    throw ParseError(std::string("expected ") + what + ", found '" + text_[pos_] + "'", pos_);
  }

  Expression expr() {
    Expression lhs = term();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = Expression::binary(BinaryOp::add, lhs, term(), at);
      } else if (accept('-')) {
        lhs = Expression::binary(BinaryOp::sub, lhs, term(), at);
      } else {
        return lhs;
      }
    }
  }

  Expression term() {
    Expression lhs = factor();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = Expression::binary(BinaryOp::mul, lhs, factor(), at);
      } else if (accept('/')) {
        lhs = Expression::binary(BinaryOp::div, lhs, factor(), at);
      } else {
        return lhs;
      }
    }
  }

  Expression factor() {
    Expression base = unary();
    skip_space();
    const std::size_t at = pos_;
    if (accept('^')) return Expression::binary(BinaryOp::pow, base, factor(), at);
    return base;
  }

  Expression unary() {
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) return Expression::negate(atom(), at);
    return atom();
  }

  Expression atom() {
    skip_space();
    if (pos_ >= text_.size()) fail_expected("operand");
    const std::size_t at = pos_;
    const char c = text_[pos_];

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
        ++end;
      const std::string_view ident = text_.substr(pos_, end - pos_);
      pos_ = end;
      if (ident == "r") return Expression::variable(Var::r, at);
      if (ident == "s") return Expression::variable(Var::s, at);

      static constexpr Func kFuncs[] = {Func::sqrt, Func::exp, Func::ln, Func::sin, Func::cos, Func::abs};
      const auto* f = std::find_if(std::begin(kFuncs), std::end(kFuncs),
                                   [&](Func fn) { return to_string(fn) == ident; });
      if (f == std::end(kFuncs)) throw ParseError("unknown identifier '" + std::string(ident) + "'", at);
      if (!accept('(')) fail_expected("'(' after function name");
      Expression arg = expr();
      if (!accept(')')) fail_expected("')'");
      return Expression::function(*f, arg, at);
    }

    if (accept('(')) {
      Expression inner = expr();
      if (!accept(')')) fail_expected("')'");
      return inner;
    }
    if (c == ')') throw ParseError("unbalanced ')'", at);
    fail_expected("operand");
  }

  Expression number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    };
    digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < text_.size() && (text_[exp_end] == '+' || text_[exp_end] == '-')) ++exp_end;
      if (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) {
        end = exp_end;
        digits();
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + at, text_.data() + end, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + end) throw ParseError("malformed number", at);
    pos_ = end;
    return Expression::number(v, at);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// Jet evaluation

namespace {

constexpr double kAbsKink = 1e-12;
constexpr unsigned long kMaxIntegerPower = 1UL << 20;

template <int D>
class Evaluator {
 public:
  Evaluator(double r, double s) : r_(r), s_(s) {}

  TaylorJet<D> eval(const Node& n) const {
    TaylorJet<D> out = eval_node(n);
    if (const int k = out.first_nonfinite_order(); k >= 0) fail(n, k, "non-finite result");
    return out;
  }

 private:
  [[noreturn]] static void fail(const Node& n, int order, const std::string& why) {
    throw DomainError(node_text(n), n.offset, order, why);
  }

  TaylorJet<D> eval_node(const Node& n) const {
    switch (n.kind) {
      case Kind::number: return TaylorJet<D>::constant(n.number, r_, s_);
      case Kind::variable:
        return n.var == Var::r ? TaylorJet<D>::variable_r(r_, s_) : TaylorJet<D>::variable_s(r_, s_);
      case Kind::negate: return -eval(*n.lhs);
      case Kind::function: return apply(n, eval(*n.lhs));
      case Kind::binary: return binary(n, eval(*n.lhs), eval(*n.rhs));
    }
    fail(n, 0, "unknown node");
  }

  TaylorJet<D> apply(const Node& n, const TaylorJet<D>& g) const {
    const double x = g.value();
    switch (n.func) {
      case Func::sqrt:
        if (x < 0.0) fail(n, 0, "sqrt of negative value");
        if (x == 0.0 && D > 0) fail(n, 1, "sqrt is not differentiable at 0");
        return compose(series::sqrt<D>(x), g);
      case Func::exp: return compose(series::exp<D>(x), g);
      case Func::ln:
        if (x <= 0.0) fail(n, 0, "ln of non-positive value");
        return compose(series::log<D>(x), g);
      case Func::sin: return compose(series::sin<D>(x), g);
      case Func::cos: return compose(series::cos<D>(x), g);
      case Func::abs:
        if (D > 0 && std::abs(x) <= kAbsKink) fail(n, 1, "abs is not differentiable at 0");
        return compose(series::abs<D>(x), g);
    }
    fail(n, 0, "unknown function");
  }

  TaylorJet<D> binary(const Node& n, const TaylorJet<D>& a, const TaylorJet<D>& b) const {
    switch (n.op) {
      case BinaryOp::add: return a + b;
      case BinaryOp::sub: return a - b;
      case BinaryOp::mul: return a * b;
      case BinaryOp::div:
        if (b.value() == 0.0) fail(n, 0, "division by zero");
        return a * compose(series::reciprocal<D>(b.value()), b);
      case BinaryOp::pow: return power(n, a, b);
    }
    fail(n, 0, "unknown operator");
  }

  TaylorJet<D> power(const Node& n, const TaylorJet<D>& base, const TaylorJet<D>& exponent) const {
    const double p = exponent.value();
    if (exponent.is_constant() && std::trunc(p) == p && std::abs(p) <= double(kMaxIntegerPower)) {
      const auto k = static_cast<unsigned long>(std::abs(p));
      TaylorJet<D> out = ipow(base, k);
      if (p >= 0.0) return out;
      if (out.value() == 0.0) fail(n, 0, "zero raised to a negative power");
      return compose(series::reciprocal<D>(out.value()), out);
    }
    // exp(exponent * ln(base))
    if (base.value() <= 0.0) fail(n, 0, "non-integer power of non-positive base");
    return exp(exponent * compose(series::log<D>(base.value()), base));
  }

  double r_, s_;
};

}  // namespace

template <int D>
TaylorJet<D> evaluate(const Expression& e, double r, double s) {
  return Evaluator<D>(r, s).eval(e.root());
}

template TaylorJet<0> evaluate<0>(const Expression&, double, double);
template TaylorJet<1> evaluate<1>(const Expression&, double, double);
template TaylorJet<2> evaluate<2>(const Expression&, double, double);
template TaylorJet<3> evaluate<3>(const Expression&, double, double);
template TaylorJet<4> evaluate<4>(const Expression&, double, double);

// ---------------------------------------------------------------------------
// Finite-difference oracle

double fd_step(int order) {
  // Balances truncation (h^4 after Richardson) against round-off (eps / h^k).
  static constexpr double kSteps[] = {0.0, 1e-4, 1e-3, 6e-3, 1e-2};
  if (order < 0 || order > 4) throw Error("fd_step: order must lie in [0, 4]");
  return kSteps[order];
}

namespace {

double binom(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// Tensor product of the k-th central-difference stencils with spacing h.
double central_difference(const Expression& e, double r, double s, int a, int b, double h) {
  double acc = 0.0;
  for (int i = 0; i <= a; ++i) {
    const double wr = ((i % 2) ? -1.0 : 1.0) * binom(a, i);
    const double dr = (0.5 * a - i) * h;
    for (int j = 0; j <= b; ++j) {
      const double ws = ((j % 2) ? -1.0 : 1.0) * binom(b, j);
      const double ds = (0.5 * b - j) * h;
      acc += wr * ws * eval_value(e, r + dr, s + ds);
    }
  }
  return acc / std::pow(h, a + b);
}

}  // namespace

double fd_partials(const Expression& e, double r, double s, int a, int b) {
  if (a < 0 || b < 0 || a + b > 4) throw Error("fd_partials: need 0 <= a + b <= 4");
  if (a + b == 0) return eval_value(e, r, s);
  const double h = fd_step(a + b) * std::max({1.0, std::abs(r), std::abs(s)});
  const double coarse = central_difference(e, r, s, a, b, h);
  const double fine = central_difference(e, r, s, a, b, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace finsler
