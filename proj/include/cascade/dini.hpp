// Dini transformations for second-order operators in three variables whose
// principal symbol factors into S1 S2.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cascade/first_order.hpp"
#include "cascade/laplace.hpp"
#include "cascade/lpdo.hpp"

namespace cascade {

/// Forward: (S1, S2) as returned by factor_symbol; Reversed: swapped.
enum class DiniOrdering { Forward, Reversed };
const char* to_string(DiniOrdering o);

/// L = S1 S2 + T + a,
/// [S2, T]  = K S1 + M S2 + N T,
/// [S1, S2] = P S1 + Q S2 + R T.
struct DiniFrame {
  LinearOperator op;
  DiniOrdering ordering = DiniOrdering::Forward;
  FirstOrderOperator S1, S2, T;
  Expr a, K, M, N, P, Q, R;
};

/// Throws Hyperbolicity (symbol), Genericity (S1, S2, T do not span).
DiniFrame dini_frame(const LinearOperator& op, DiniOrdering ordering);

/// S2(beta) - (R beta^2 + (N + P) beta + K).
Expr beta_equation_residual(const DiniFrame& f, const Expr& beta);

/// The part of the closure system left after eliminating nu and mu; it does
/// not involve alpha:
/// beta S1(beta) - T(beta) + S2(a) - S2 S1(beta) + nu (a - S1(beta)) - Q beta^2 - M beta,
/// nu = -(N + R beta).
Expr closure_constraint(const DiniFrame& f, const Expr& beta);

/// Residuals of the four closure equations with nu = -(N + beta R) and
/// mu = nu alpha + S2(alpha) - beta Q - M.
std::array<Expr, 4> system_residuals(const DiniFrame& f, const Expr& alpha, const Expr& beta);

struct BetaSearchOptions {
  int degree_bound = 2;
  /// Keep only beta that also satisfy closure_constraint.
  bool closure = false;
};

/// Candidates beta with zero residual of the Riccati-type equation: beta = 0
/// when admissible, a polynomial ansatz, and rational beta = -S2(g)/(R g)
/// (and the variant S2(g)/g) from a polynomial ansatz for g.
std::vector<Expr> solve_beta(const DiniFrame& f, const BetaSearchOptions& opts = {});

/// alpha with all four residuals zero, by polynomial ansatz up to the bound
/// (alpha = 0 is tried first).
std::optional<Expr> solve_alpha(const DiniFrame& f, const Expr& beta, int degree_bound = 2);

struct DiniStep {
  Expr alpha, beta, mu, nu, b;
  FirstOrderOperator V;
  LinearOperator L1;
};

/// Builds V, b, mu, nu and L1 = (S2 + beta)(S1 + alpha) + (V + b) + nu (S1 + alpha) - mu.
/// Throws Consistency if the closure identity fails as an operator identity.
DiniStep dini_transform(const DiniFrame& f, const Expr& alpha, const Expr& beta);

/// [(V + b), (S2 + beta)] - mu (S2 + beta) - nu (V + b).
LinearOperator closure_residual(const DiniFrame& f, const DiniStep& s);

/// L = (X + p)(Y + q) with {X, Y} the characteristic factors of L's symbol.
struct Factorization {
  FirstOrderOperator left, right;  // with zeroth-order parts p, q
};
std::optional<Factorization> factor_operator(const LinearOperator& op);

struct DiniLink {
  int step = 0;
  DiniFrame frame;
  std::optional<DiniStep> transform;
  /// "factorable", "transformed", "beta-search-failed", "alpha-search-failed", "error: ..."
  std::string status;
  std::optional<Factorization> factorization;  // of transform->L1
};

struct DiniChain {
  DiniOrdering ordering = DiniOrdering::Forward;
  std::vector<DiniLink> links;
  bool factorable() const { return !links.empty() && links.back().status == "factorable"; }
};

struct DiniChainReport {
  std::vector<DiniChain> chains;  // one per ordering
};

DiniChainReport dini_chain(const LinearOperator& op, int max_steps = 10, int degree_bound = 2);

/// General solution of (X + p)(Y + q) v = 0:
/// (X + p) w = 0 gives w with function phi; (Y + q) v = w with function psi.
/// Throws Unsupported if the first-order solves fail.
Expr factored_general_solution(const Factorization& fac, const std::string& phi = "phi",
                               const std::string& psi = "psi");

struct BackSubstitution {
  Expr u;
  std::string detail;
};

/// u from (S2 + beta) u = v, (V + b) u = -(S1 + alpha) v, with the
/// integration function theta. Requires the first integrals of S2 to be
/// coordinates. Throws Unsupported otherwise or when quadratures block the
/// reduction.
BackSubstitution back_substitute(const DiniStep& step, const Expr& v, const DiniFrame& f,
                                 const std::string& theta = "theta");

struct DiniSolution {
  int link_step = 0;
  DiniOrdering ordering = DiniOrdering::Forward;
  Expr v;                 // kernel of the factorable link, symbolic phi, psi
  std::optional<Expr> u;  // symbolic u when the reduction closes
  VerificationStatus status = VerificationStatus::NotChecked;
  std::vector<std::string> witness_log;
};

/// Solution of L u = 0 through the first factorable link of the report
/// (one transformation step). Verified on polynomial witnesses for phi, psi
/// with theta symbolic when the symbolic reduction does not close.
std::optional<DiniSolution> dini_solution(const LinearOperator& op, const DiniChainReport& report,
                                          std::uint64_t seed = 20061);

/// Back-substitution for explicit witnesses of phi, psi (bodies in slots s, t).
Expr dini_witness_solution(const LinearOperator& op, const DiniFrame& f, const DiniStep& step,
                           const Expr& v_symbolic, const std::map<std::string, FunctionWitness>& w);

}  // namespace cascade
