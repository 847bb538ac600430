#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace galab::cli {

using cplx = std::complex<double>;

/// Parsed formula over complex numbers.
///
/// Grammar, loosest binding first:
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | number 'i' | name | name '(' sum ')' | '(' sum ')'
/// The exponent of '^' must be a constant integer. Names are x, y, z, zbar,
/// tau (alias of z), i and pi; functions are exp, conj, re, im and sqrt.
class Expression {
 public:
  struct Node;

  Expression() = default;
  explicit Expression(std::shared_ptr<const Node> root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  /// Value at the point z = x + iy. Throws EvalError on division by zero.
  cplx operator()(cplx z) const;
  cplx operator()(double x, double y) const { return (*this)({x, y}); }

  const std::string& source() const { return source_; }
  bool empty() const { return !root_; }
  /// True when the formula does not involve x, y, z, zbar or tau.
  bool is_constant() const;
  /// Ascending coefficients when the formula is a polynomial in y alone.
  std::optional<std::vector<cplx>> as_polynomial_in_y() const;
  /// Compact prefix rendering of the tree, e.g. (* 2 (var z)).
  std::string to_string() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

/// Throws ParseError with the 1-based line and column of the offending token.
Expression parse_expression(const std::string& src);

}  // namespace galab::cli
