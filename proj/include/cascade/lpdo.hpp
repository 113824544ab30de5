// Linear partial differential operators with symbolic coefficients in
// 2 or 3 independent variables, written in normal order (coefficients left).
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cascade/calculus.hpp"
#include "cascade/expr.hpp"

namespace cascade {

using Variables = std::vector<std::string>;
using MultiIndex = std::vector<int>;

/// Higher total order first, then lexicographically larger first.
struct MultiIndexGreater {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

class LinearOperator {
 public:
  using Terms = std::map<MultiIndex, Expr, MultiIndexGreater>;

  LinearOperator() = default;
  explicit LinearOperator(Variables vars);

  static LinearOperator scalar(const Variables& vars, const Expr& c);
  /// D_{vars[i]}
  static LinearOperator derivation(const Variables& vars, std::size_t i);
  static LinearOperator monomial(const Variables& vars, const MultiIndex& alpha, const Expr& c = Expr(1));

  const Variables& vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  Expr coefficient(const MultiIndex& alpha) const;
  void add_term(const MultiIndex& alpha, const Expr& c);
  bool is_zero() const { return terms_.empty(); }
  /// -1 for the zero operator.
  int order() const;

  /// Part of exactly the given total order.
  LinearOperator homogeneous_part(int order) const;

  LinearOperator& operator+=(const LinearOperator& o);
  LinearOperator& operator-=(const LinearOperator& o);
  friend LinearOperator operator+(LinearOperator a, const LinearOperator& b) { return a += b; }
  friend LinearOperator operator-(LinearOperator a, const LinearOperator& b) { return a -= b; }
  friend LinearOperator operator*(const Expr& c, const LinearOperator& a);
  friend bool operator==(const LinearOperator& a, const LinearOperator& b);
  friend bool operator!=(const LinearOperator& a, const LinearOperator& b) { return !(a == b); }

  std::string str() const;

 private:
  Variables vars_;
  Terms terms_;
};

/// b_1 D_1 + ... + b_n D_n + b_0.
class FirstOrderOperator {
 public:
  FirstOrderOperator() = default;
  FirstOrderOperator(Variables vars, std::vector<Expr> field, Expr zeroth = Expr(0));
  static FirstOrderOperator from_operator(const LinearOperator& op);

  const Variables& vars() const { return vars_; }
  const std::vector<Expr>& field() const { return field_; }
  const Expr& coefficient(std::size_t i) const { return field_[i]; }
  const Expr& zeroth() const { return zeroth_; }
  bool is_pure() const { return zeroth_.is_zero(); }
  bool has_zero_field() const;

  FirstOrderOperator pure() const { return {vars_, field_, Expr(0)}; }
  FirstOrderOperator with_zeroth(const Expr& b0) const { return {vars_, field_, b0}; }
  /// Divides by the leading nonzero field coefficient (variable order).
  FirstOrderOperator normalized() const;
  /// Index of the leading nonzero field coefficient.
  std::optional<std::size_t> leading_index() const;

  Expr apply(const Expr& u) const;
  LinearOperator to_operator() const;

  FirstOrderOperator scaled(const Expr& c) const;
  friend FirstOrderOperator operator+(const FirstOrderOperator& a, const FirstOrderOperator& b);
  friend FirstOrderOperator operator-(const FirstOrderOperator& a, const FirstOrderOperator& b);
  friend bool operator==(const FirstOrderOperator& a, const FirstOrderOperator& b);

  std::string str() const;

 private:
  Variables vars_;
  std::vector<Expr> field_;
  Expr zeroth_;
};

/// Homogeneous quadratic form sum s_ij xi_i xi_j (i <= j).
class SymbolPolynomial {
 public:
  SymbolPolynomial() = default;
  explicit SymbolPolynomial(Variables vars) : vars_(std::move(vars)) {}

  const Variables& vars() const { return vars_; }
  Expr coefficient(std::size_t i, std::size_t j) const;
  void add(std::size_t i, std::size_t j, const Expr& c);
  const std::map<std::pair<std::size_t, std::size_t>, Expr>& terms() const { return terms_; }
  friend bool operator==(const SymbolPolynomial& a, const SymbolPolynomial& b);
  /// Product of the symbols of two first-order operators.
  static SymbolPolynomial product(const FirstOrderOperator& a, const FirstOrderOperator& b);
  std::string str() const;

 private:
  Variables vars_;
  std::map<std::pair<std::size_t, std::size_t>, Expr> terms_;
};

Expr apply(const LinearOperator& op, const Expr& u);
LinearOperator compose(const LinearOperator& a, const LinearOperator& b);
/// [A, B] for pure first-order operators; the second-order parts cancel.
FirstOrderOperator commutator(const FirstOrderOperator& a, const FirstOrderOperator& b);
/// Conjugation lambda^{-1} o L o lambda.
LinearOperator gauge(const LinearOperator& op, const Expr& lambda);

SymbolPolynomial principal_symbol(const LinearOperator& op);

enum class FactorStatus { Factored, NotFactorable, Repeated };
const char* to_string(FactorStatus s);

struct SymbolFactorization {
  FactorStatus status = FactorStatus::NotFactorable;
  std::optional<std::pair<FirstOrderOperator, FirstOrderOperator>> factors;
};

/// Splits a quadratic symbol into two linear factors over the coefficient
/// field. The first factor is normalized to leading coefficient 1.
SymbolFactorization factor_symbol(const SymbolPolynomial& s);

/// Coefficients (c1, c2, c3) with W = c1 B1 + c2 B2 + c3 B3 as vector fields.
/// Throws Genericity when the frame is singular.
std::array<Expr, 3> decompose_in_frame(const FirstOrderOperator& w,
                                       const std::array<FirstOrderOperator, 3>& basis);

/// Coefficients (c1, c2) with W = c1 B1 + c2 B2, or nullopt if W is not in
/// their span (or the pair is degenerate).
std::optional<std::array<Expr, 2>> decompose_in_span(const FirstOrderOperator& w,
                                                     const FirstOrderOperator& b1,
                                                     const FirstOrderOperator& b2);

/// Determinant of the matrix with the field coefficients of the given rows.
Expr field_determinant(const std::vector<FirstOrderOperator>& rows);

/// Splits L - compose(A, B) into its first-order part and zeroth-order part;
/// throws Consistency if a second-order remainder is left.
std::pair<FirstOrderOperator, Expr> first_order_remainder(const LinearOperator& op,
                                                          const FirstOrderOperator& a,
                                                          const FirstOrderOperator& b);

}  // namespace cascade
