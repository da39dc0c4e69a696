#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "finsler/jet.hpp"

namespace finsler {

enum class Var { r, s };
enum class Func { sqrt, exp, ln, sin, cos, abs };
enum class BinaryOp { add, sub, mul, div, pow };

std::string_view to_string(Func f);
std::string_view to_string(BinaryOp op);

// Immutable AST for phi(r, s) and friends. Nodes are shared between copies.
class Expression {
 public:
  enum class Kind { number, variable, negate, function, binary };

  struct Node {
    Kind kind = Kind::number;
    double number = 0.0;
    Var var = Var::r;
    Func func = Func::sqrt;
    BinaryOp op = BinaryOp::add;
    std::shared_ptr<const Node> lhs;  // operand for negate/function
    std::shared_ptr<const Node> rhs;
    std::size_t offset = 0;  // byte offset in the source text; not part of equality
  };

  static Expression number(double v, std::size_t offset = 0);
  static Expression variable(Var v, std::size_t offset = 0);
  static Expression negate(const Expression& e, std::size_t offset = 0);
  static Expression function(Func f, const Expression& arg, std::size_t offset = 0);
  static Expression binary(BinaryOp op, const Expression& a, const Expression& b, std::size_t offset = 0);

  const Node& root() const { return *root_; }
  Kind kind() const { return root_->kind; }

  // Fully parenthesized text that parses back to a structurally equal tree.
  std::string str() const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  explicit Expression(std::shared_ptr<const Node> n) : root_(std::move(n)) {}
  std::shared_ptr<const Node> root_;
};

// Grammar (whitespace between tokens is ignored):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?
//   unary  := '-'? atom
//   atom   := number | 'r' | 's' | ident '(' expr ')' | '(' expr ')'
// Note that unary minus binds tighter than '^': "-s^2" is (-s)^2.
// Throws ParseError with the byte offset of the offending token.
Expression parse(std::string_view text);

// Jet of e at (r, s) truncated at degree D. Throws DomainError naming the
// first node (post-order) whose value or derivatives cannot be formed.
template <int D>
TaylorJet<D> evaluate(const Expression& e, double r, double s);

extern template TaylorJet<0> evaluate<0>(const Expression&, double, double);
extern template TaylorJet<1> evaluate<1>(const Expression&, double, double);
extern template TaylorJet<2> evaluate<2>(const Expression&, double, double);
extern template TaylorJet<3> evaluate<3>(const Expression&, double, double);
extern template TaylorJet<4> evaluate<4>(const Expression&, double, double);

inline Jet4 eval_jet(const Expression& e, double r, double s) { return evaluate<kJetDegree>(e, r, s); }
inline double eval_value(const Expression& e, double r, double s) { return evaluate<0>(e, r, s).value(); }

// Central-difference estimate of d^a/dr^a d^b/ds^b e at (r, s) with one
// Richardson refinement. Test oracle: shares only the value evaluator with
// eval_jet. Requires a + b <= 4.
double fd_partials(const Expression& e, double r, double s, int a, int b);

// Base step used by fd_partials for total order k (before scaling by
// max(1, |r|, |s|)).
double fd_step(int order);

}  // namespace finsler
