// Exact symbolic scalars: rational functions over Q in a set of atoms
// (variables, applications of arbitrary function symbols, exp, ln and
// unevaluated antiderivatives). Every Expr is kept in canonical form:
// numerator / denominator with gcd 1 and a monic denominator.
#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cascade {

using Rational = mpq_class;

enum class ErrorKind {
  Degenerate,      // division by something that is identically zero
  Parse,
  UnknownVariable,
  NotFactorable,
  RepeatedFactor,
  Hyperbolicity,
  Genericity,
  Precondition,
  Unsupported,
  Consistency,
  UnsupportedOrder,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind);

class Expr;
struct AtomData;
using Atom = std::shared_ptr<const AtomData>;

enum class AtomKind { Variable = 0, Function = 1, Exp = 2, Log = 3, Integral = 4 };

/// Strict weak order on atoms: variables first, then by canonical key.
bool atom_less(const Atom& a, const Atom& b);

struct AtomLess {
  bool operator()(const Atom& a, const Atom& b) const { return atom_less(a, b); }
};

/// A power product of atoms, sorted by atom_less, all exponents positive.
class Monomial {
 public:
  Monomial() = default;
  static Monomial of(const Atom& a, int exponent = 1);

  const std::vector<std::pair<Atom, int>>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  int total_degree() const;
  int degree(const Atom& a) const;
  Monomial without(const Atom& a) const;
  /// Divides out the given atom completely or by the given power.
  Monomial reduced(const Atom& a, int by) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b);

 private:
  std::vector<std::pair<Atom, int>> factors_;
};

/// Graded lexicographic order, larger monomials first.
struct MonomialGreater {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate polynomial with rational coefficients.
class Poly {
 public:
  using Terms = std::map<Monomial, Rational, MonomialGreater>;

  Poly() = default;
  Poly(const Rational& c);  // NOLINT(google-explicit-constructor)
  Poly(int c) : Poly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  static Poly atom(const Atom& a, int exponent = 1);
  static Poly term(const Monomial& m, const Rational& c);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // requires is_constant()
  Rational leading_coefficient() const;
  const Monomial& leading_monomial() const;
  std::size_t size() const { return terms_.size(); }

  std::set<Atom, AtomLess> atoms() const;
  bool contains(const Atom& a) const;
  int degree(const Atom& a) const;
  int total_degree() const;

  /// Coefficients as a univariate polynomial in a (keys are degrees).
  std::map<int, Poly> coefficients_in(const Atom& a) const;
  static Poly from_coefficients(const std::map<int, Poly>& coeffs, const Atom& a);
  Poly coefficient_of_degree(const Atom& a, int d) const;

  /// Formal partial derivative treating the atom as an indeterminate.
  Poly formal_derivative(const Atom& a) const;

  void add_term(const Monomial& m, const Rational& c);
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rational& c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= Rational(-1); }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
  friend bool operator==(const Poly& a, const Poly& b);
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly pow(int e) const;
  Poly monic() const;

 private:
  Terms terms_;
};

/// Canonical exact scalar. Cheap to copy (shared immutable representation).
class Expr {
 public:
  Expr();
  Expr(int c);               // NOLINT(google-explicit-constructor)
  Expr(const Rational& c);   // NOLINT(google-explicit-constructor)
  Expr(const Poly& p);       // NOLINT(google-explicit-constructor)
  /// Builds num/den and brings it to canonical form; throws Degenerate on den == 0.
  static Expr fraction(const Poly& num, const Poly& den);
  static Expr variable(const std::string& name);
  static Expr from_atom(const Atom& a);

  const Poly& num() const;
  const Poly& den() const;

  bool is_zero() const { return num().is_zero(); }
  bool is_constant() const { return num().is_constant() && den().is_constant(); }
  bool is_polynomial() const { return den().is_constant(); }
  Rational constant_value() const;  // requires is_constant()
  std::set<Atom, AtomLess> atoms() const;
  /// True when the expression is a single variable atom; returns its name.
  const std::string* as_variable() const;

  Expr operator-() const;
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }
  Expr& operator/=(const Expr& o) { return *this = *this / o; }
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  Expr pow(int e) const;
  Expr inverse() const;

  /// Canonical text form (see parse.hpp for the grammar).
  std::string str() const;

 private:
  struct Rep;
  explicit Expr(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

struct AtomData {
  AtomKind kind;
  std::string name;             // variable, function symbol, or integration variable
  std::vector<int> derivative;  // per argument slot, Function only
  std::vector<Expr> args;       // Function arguments; Exp/Log/Integral: one operand
  std::string key;
  std::set<std::string> depends;  // variables this atom depends on
};

// Atom constructors. They intern atoms so equal keys share storage.
Atom make_variable_atom(const std::string& name);
Atom make_function_atom(const std::string& name, std::vector<int> derivative,
                        std::vector<Expr> args);
Atom make_exp_atom(const Expr& arg);
Atom make_log_atom(const Expr& arg);
Atom make_integral_atom(const Expr& integrand, const std::string& var);

// Expression constructors with the usual simplifications.
Expr var(const std::string& name);
Expr func(const std::string& name, std::vector<Expr> args);
Expr func_derivative(const std::string& name, std::vector<int> derivative,
                     std::vector<Expr> args);
Expr exp(const Expr& arg);  // exp(0)=1, exp(k*ln(g)+r) = g^k*exp(r) for integer k
Expr ln(const Expr& arg);   // ln(1)=0, ln(exp(z))=z
/// Unevaluated antiderivative node; a rational content factor is pulled out.
Expr integral_node(const Expr& integrand, const std::string& var);

/// normalize() is the identity on canonical values; it is provided for
/// symmetry with the tree-based description of expressions.
inline const Expr& normalize(const Expr& e) { return e; }

bool depends_on(const Expr& e, const std::string& var);
bool contains_kind(const Expr& e, AtomKind kind);
/// Names of function symbols occurring anywhere (including nested args), with arity.
std::map<std::string, std::size_t> function_symbols(const Expr& e);

std::string atom_text(const AtomData& a);

}  // namespace cascade
