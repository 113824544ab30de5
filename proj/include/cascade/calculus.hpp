// Differentiation, substitution, evaluation, zero testing and a small
// antiderivative heuristic on canonical expressions.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cascade/expr.hpp"

namespace cascade {

/// Exact partial derivative. Function applications follow the chain rule and
/// gain derivative annotations; antiderivative nodes differentiate to their
/// integrand in their own variable and under the integral sign otherwise.
Expr diff(const Expr& e, const std::string& v);
Expr diff(const Expr& e, const std::string& v, int times);

/// Antiderivative in v for polynomials in v, rational functions in v whose
/// square-free denominator splits into linear factors over the coefficient
/// field (degree <= 2), and p(v)*exp(q*v + r) with q free of v. Anything else
/// is kept as an unevaluated node, so the result is always differentiable.
Expr integrate_heuristic(const Expr& e, const std::string& v);

/// True when the result of integrate_heuristic contains no antiderivative node.
bool is_closed_form(const Expr& e);

/// Simultaneous substitution of variables.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& values);
Expr substitute(const Expr& e, const std::string& v, const Expr& value);

/// A concrete instance of an arbitrary function symbol: an expression in the
/// slot variables `slots` (one per argument).
struct FunctionWitness {
  std::vector<std::string> slots;
  Expr body;
};

/// Replaces every application of the named function symbols (and their
/// derivatives) by the witness; antiderivative nodes are re-integrated.
Expr instantiate_functions(const Expr& e, const std::map<std::string, FunctionWitness>& witnesses);

/// Generic atom rewrite used by substitution routines; fn returns a
/// replacement for an atom or nullopt to keep (and recurse into) it.
Expr map_atoms(const Expr& e, const std::function<std::optional<Expr>(const Atom&)>& fn);

/// Exact evaluation at a rational point. Nullopt when an atom other than a
/// variable remains or a denominator vanishes.
std::optional<Rational> evaluate(const Expr& e, const std::map<std::string, Rational>& point);

enum class ZeroStatus { Zero, NonZero, Inconclusive };
const char* to_string(ZeroStatus s);

struct ZeroTest {
  ZeroStatus status = ZeroStatus::Inconclusive;
  /// Rational point where the expression was seen to be nonzero, if sampled.
  std::optional<std::map<std::string, Rational>> witness;
  bool is_zero() const { return status == ZeroStatus::Zero; }
};

struct SamplingOptions {
  int points = 5;
  std::uint64_t seed = 20061;
};

/// Canonical zero test. Applications of distinct (derivative-annotated)
/// function symbols are independent basis elements. Expressions carrying
/// exp/ln/antiderivative atoms that do not cancel symbolically are sampled;
/// when sampling is impossible the result is Inconclusive, never Zero.
ZeroTest is_zero(const Expr& e, const SamplingOptions& opts = {});

/// Randomized evaluation test on variables only: Zero if every sampled point
/// evaluates to 0, NonZero with witness otherwise, Inconclusive if no point
/// could be evaluated.
ZeroTest sample_zero(const Expr& e, const std::vector<std::string>& vars,
                     const SamplingOptions& opts = {});

/// Random rational number p/q with |p| <= range, 1 <= q <= range.
Rational random_rational(std::mt19937_64& rng, int range = 9);

/// Random polynomial witness of total degree <= degree in the given slots.
FunctionWitness random_polynomial_witness(std::mt19937_64& rng, std::size_t arity, int degree);

/// Coefficient of a function-symbol atom in an expression linear in it.
Expr linear_coefficient(const Expr& e, const Atom& a);

/// Set of variable names an expression depends on.
std::set<std::string> variables_of(const Expr& e);

}  // namespace cascade
