// Multivariate polynomial algorithms over Q: exact division, gcd via
// primitive pseudo-remainder sequences, square-free decomposition.
#pragma once

#include <optional>
#include <vector>

#include "cascade/expr.hpp"

namespace cascade::polyalg {

/// a / b when b divides a exactly, otherwise nullopt.
std::optional<Poly> exact_div(const Poly& a, const Poly& b);

/// Monic gcd (leading coefficient 1). gcd(0, 0) = 0.
Poly gcd(const Poly& a, const Poly& b);

/// gcd of the coefficients of p seen as univariate in a.
Poly content(const Poly& p, const Atom& a);
Poly primitive_part(const Poly& p, const Atom& a);

/// Pseudo-remainder of a by b with respect to atom v.
Poly prem(const Poly& a, const Poly& b, const Atom& v);

struct SquareFree {
  Rational unit;                               // p = unit * prod f_i^m_i
  std::vector<std::pair<Poly, int>> factors;   // monic, pairwise coprime
};

SquareFree square_free(const Poly& p);

/// Exact square root when p is a perfect square in Q[atoms].
std::optional<Poly> sqrt_exact(const Poly& p);

/// Exact square root of a rational function when num and den are squares.
std::optional<Expr> sqrt_exact(const Expr& e);

/// Substitute value for atom a (Horner evaluation in the polynomial ring).
Poly substitute(const Poly& p, const Atom& a, const Poly& value);

/// Rational roots of a univariate polynomial in a with rational coefficients.
std::vector<Rational> rational_roots(const Poly& p, const Atom& a);

}  // namespace cascade::polyalg
