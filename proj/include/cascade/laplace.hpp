// Characteristic forms, Laplace invariants and the Laplace cascade for
// hyperbolic second-order operators in two variables.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cascade/first_order.hpp"
#include "cascade/lpdo.hpp"

namespace cascade {

/// L = X1 X2 + alpha1 X1 + alpha2 X2 + alpha3
///   = X2 X1 + alphabar1 X1 + alphabar2 X2 + alpha3,
/// [X1, X2] = P X1 + Q X2.
struct LaplaceInvariants {
  Expr h, k;
};

struct CharacteristicForm {
  LinearOperator op;
  FirstOrderOperator X1, X2;
  Expr alpha1, alpha2, alpha3, alphabar1, alphabar2, P, Q;
  /// Computed from the alphas by characteristic_form.
  LaplaceInvariants inv;
};

/// Characteristic operators from the factored principal symbol; X1 has
/// leading coefficient 1. Throws Hyperbolicity for non-factorable or
/// repeated symbols.
CharacteristicForm characteristic_form(const LinearOperator& op);
/// Same with prescribed characteristic operators.
CharacteristicForm characteristic_form(const LinearOperator& op, const FirstOrderOperator& x1,
                                       const FirstOrderOperator& x2);

/// h = X1(alpha1) + alpha1 alpha2 - alpha3,  k = X2(alphabar2) + alphabar1 alphabar2 - alpha3.
LaplaceInvariants laplace_invariants(const CharacteristicForm& f);

/// L - [(X1 + alpha2)(X2 + alpha1) - h] and L - [(X2 + alphabar1)(X1 + alphabar2) - k].
std::pair<LinearOperator, LinearOperator> partial_factorization_residuals(const CharacteristicForm& f);

/// Operator annihilating v = (X2 + alpha1) u; requires h != 0.
CharacteristicForm x1_transform(const CharacteristicForm& f);
/// Operator annihilating w with u = (X2 + alphabar1) w / k; requires k != 0.
CharacteristicForm x2_transform(const CharacteristicForm& f);

/// Closed formula for the invariant h of x1_transform(f):
/// 2h - k - X1 X2 ln h + Q X2 ln h + X2(Q) - X1(P) + 2PQ.
Expr h1_closed_formula(const CharacteristicForm& f);

struct ChainLink {
  int index = 0;
  CharacteristicForm form;
  LaplaceInvariants inv;
};

struct ChainReport {
  /// Ordered by index, from the most negative to the most positive.
  std::vector<ChainLink> links;
  /// First i >= 0 with h_(i) = 0.
  std::optional<int> N;
  /// First j >= 0 with k_(-j) = 0, equivalently h_(-j-1) = 0.
  std::optional<int> K;
  int max_steps = 0;
  int steps_used = 0;

  const ChainLink& at(int index) const;
  bool terminated() const { return N.has_value() || K.has_value(); }
};

bool expr_is_zero(const Expr& e);

ChainReport run_chain(const LinearOperator& op, int max_steps = 10);

enum class VerificationStatus { NotChecked, Verified, VerifiedOnWitnesses, Failed, Inconclusive };
const char* to_string(VerificationStatus s);

struct SolutionCertificate {
  Expr solution;
  std::string f_name = "F", g_name = "G";
  /// c_i, d_i: coefficient of the i-th derivative of F (resp. G); empty when
  /// that function only occurs inside a quadrature.
  std::vector<Expr> f_coefficients, g_coefficients;
  bool quadrature_free = true;
  std::string provenance;
  VerificationStatus status = VerificationStatus::NotChecked;
};

/// Closed-form general solution from a chain terminated on at least one side.
SolutionCertificate build_solution(const ChainReport& r);

struct VerificationReport {
  VerificationStatus status = VerificationStatus::NotChecked;
  Expr residual;
  /// Rational point (after witness instantiation, if any) with nonzero residual.
  std::optional<std::map<std::string, Rational>> witness;
  std::string detail;
};

/// apply(L, u) == 0; quadratures are closed by instantiating every function
/// symbol with random polynomial witnesses of degree <= 3.
VerificationReport verify_solution(const LinearOperator& op, const Expr& u, std::uint64_t seed = 20061);
VerificationReport verify_solution(const LinearOperator& op, SolutionCertificate& cert,
                                   std::uint64_t seed = 20061);

}  // namespace cascade
