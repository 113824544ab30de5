// Exact linear algebra over Q and undetermined-coefficient systems.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cascade/expr.hpp"

namespace cascade::linsolve {

using Row = std::vector<Rational>;
using Matrix = std::vector<Row>;

/// In-place reduced row echelon form; returns pivot columns.
std::vector<std::size_t> rref(Matrix& m);

/// Basis of {x : m x = 0} for an r x n matrix.
std::vector<Row> nullspace(Matrix m, std::size_t columns);

/// Collects the coefficients of e (numerator) with respect to every
/// power product of atoms that are not unknowns. Each returned polynomial
/// lives in the unknowns only; e vanishes iff all of them vanish.
std::vector<Poly> coefficient_equations(const Expr& e, const std::set<std::string>& unknowns);

/// Linear system A x = b extracted from equations of degree <= 1.
/// Throws Consistency if an equation is nonlinear.
struct LinearSystem {
  Matrix a;
  Row b;
};
LinearSystem linear_system(const std::vector<Poly>& equations, const std::vector<std::string>& unknowns);

/// One solution (free unknowns set to 0) or nullopt if inconsistent.
std::optional<std::map<std::string, Rational>> solve_linear(const std::vector<Poly>& equations,
                                                            const std::vector<std::string>& unknowns);

/// Rational solutions of a polynomial system by elimination and branching:
/// linear unknowns with constant coefficients are eliminated, univariate
/// equations branch on their rational roots, monomial factors branch on
/// their atoms, and a nonconstant linear coefficient branches on whether it
/// vanishes. Undetermined unknowns are set to 0. Incomplete by design.
std::vector<std::map<std::string, Rational>> solve_polynomial_system(
    const std::vector<Poly>& equations, const std::vector<std::string>& unknowns,
    std::size_t max_solutions = 16);

/// Fresh unknown names prefix0, prefix1, ...
std::vector<std::string> fresh_unknowns(const std::string& prefix, std::size_t count);

}  // namespace cascade::linsolve
