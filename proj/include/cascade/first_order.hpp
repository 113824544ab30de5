// General solutions of first-order linear PDEs  sum b_i D_i u + b_0 u = r.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cascade/lpdo.hpp"

namespace cascade {

struct FirstOrderOptions {
  int degree_bound = 3;              // polynomial invariant ansatz
  bool rational_invariants = false;  // also try quotients P/Q
  std::string function_name = "F";
};

struct FirstOrderSolution {
  bool supported = false;
  /// n-1 functionally independent first integrals of the vector field.
  std::vector<Expr> invariants;
  /// E with (W) E = 0 including the zeroth-order term; 1 when b_0 = 0.
  Expr integrating_factor{1};
  /// Some u_p with W u_p = r.
  Expr particular{0};
  /// u_p + E * F(invariants).
  Expr general{0};
  /// Characteristic system when unsupported.
  std::string reduced_system;
};

FirstOrderSolution solve_first_order_heuristic(const FirstOrderOperator& w, const Expr& rhs,
                                               const FirstOrderOptions& opts = {});

/// Polynomial first integrals of a pure field up to the given total degree
/// (a basis of the nonconstant part of the solution space).
std::vector<Expr> polynomial_invariants(const FirstOrderOperator& w, int degree_bound);

/// Leading coefficient 1, additive rational constant removed.
Expr normalize_invariant(const Expr& e);

}  // namespace cascade
