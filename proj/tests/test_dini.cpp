#include <doctest.h>

#include "cascade/dini.hpp"
#include "cascade/parse.hpp"
#include "support/generators.hpp"

using namespace cascade;

namespace {
const Variables kXYZ{"x", "y", "z"};
Expr P(const std::string& s) { return parse_expression(s, kXYZ); }
LinearOperator Op(const std::string& s) { return parse_operator(s, kXYZ); }
FirstOrderOperator F1(const std::string& s) { return FirstOrderOperator::from_operator(Op(s)); }
const LinearOperator kModel = Op("Dx*Dy + x*Dx*Dz - Dz");

bool zero_operator(const LinearOperator& op) {
  for (const auto& [m, c] : op.terms())
    if (!expr_is_zero(c)) return false;
  return true;
}

bool contains(const std::vector<Expr>& v, const Expr& e) {
  for (const Expr& x : v)
    if (x == e) return true;
  return false;
}
}  // namespace

TEST_CASE("frame examples") {
  const DiniFrame r = dini_frame(kModel, DiniOrdering::Reversed);
  CHECK(r.S1 == F1("Dy + x*Dz"));
  CHECK(r.S2 == F1("Dx"));
  CHECK(r.T == F1("-Dz"));
  CHECK(r.a.is_zero());
  for (const Expr* c : {&r.K, &r.M, &r.N, &r.P, &r.Q}) CHECK(c->is_zero());
  CHECK(r.R == Expr(1));
  CHECK(zero_operator(compose(r.S1.to_operator(), r.S2.to_operator()) + r.T.to_operator() - kModel));

  const DiniFrame f = dini_frame(kModel, DiniOrdering::Forward);
  CHECK(f.S1 == F1("Dx"));
  CHECK(f.S2 == F1("Dy + x*Dz"));
  CHECK(f.T == F1("-2*Dz"));
  CHECK(f.a.is_zero());
  CHECK(zero_operator(compose(f.S1.to_operator(), f.S2.to_operator()) + f.T.to_operator() - kModel));

  CHECK_THROWS_AS(dini_frame(Op("Dx^2 + Dy^2 + Dz"), DiniOrdering::Forward), Error);
  // T = Dx lies in the span of S1, S2.
  CHECK_THROWS_AS(dini_frame(Op("Dx*Dy + Dx"), DiniOrdering::Forward), Error);
}

TEST_CASE("beta equation examples") {
  const DiniFrame r = dini_frame(kModel, DiniOrdering::Reversed);
  CHECK(beta_equation_residual(r, Expr(0)).is_zero());
  CHECK_FALSE(beta_equation_residual(r, Expr(1)).is_zero());
  // S2 = Dx, R = 1: beta' = beta^2 is solved by -1/(x + c).
  CHECK(beta_equation_residual(r, P("-1/(x + y)")).is_zero());
  const std::vector<Expr> betas = solve_beta(r);
  REQUIRE_FALSE(betas.empty());
  CHECK(betas.front().is_zero());
  for (const Expr& b : betas) CHECK(beta_equation_residual(r, b).is_zero());
  BetaSearchOptions closure;
  closure.closure = true;
  for (const Expr& b : solve_beta(r, closure)) CHECK(closure_constraint(r, b).is_zero());
}

TEST_CASE("transformation of the model operator") {
  const DiniFrame r = dini_frame(kModel, DiniOrdering::Reversed);
  const auto alpha = solve_alpha(r, Expr(0));
  REQUIRE(alpha.has_value());
  CHECK(alpha->is_zero());
  for (const Expr& e : system_residuals(r, *alpha, Expr(0))) CHECK(e.is_zero());
  const DiniStep s = dini_transform(r, Expr(0), Expr(0));
  CHECK(zero_operator(closure_residual(r, s)));
  CHECK(s.L1 == compose(Op("Dy + x*Dz"), Op("Dx")));
  const auto fac = factor_operator(s.L1);
  REQUIRE(fac.has_value());

  // u = x z lies in the kernel; v = S2 u = z lies in the kernel of L1.
  CHECK(apply(kModel, P("x*z")).is_zero());
  const Expr v = r.S2.apply(P("x*z"));
  CHECK(v == P("z"));
  CHECK(apply(s.L1, v).is_zero());
}

TEST_CASE("chains of the model operator") {
  const DiniChainReport rep = dini_chain(kModel, 4);
  REQUIRE(rep.chains.size() == 2);
  const DiniChain* reversed = nullptr;
  const DiniChain* forward = nullptr;
  for (const DiniChain& c : rep.chains) (c.ordering == DiniOrdering::Reversed ? reversed : forward) = &c;
  REQUIRE(reversed != nullptr);
  REQUIRE(forward != nullptr);
  CHECK(reversed->factorable());
  CHECK(reversed->links.front().step == 1);
  CHECK_FALSE(forward->factorable());
}

TEST_CASE("solution of the model operator") {
  const auto sol = dini_solution(kModel, dini_chain(kModel, 4));
  REQUIRE(sol.has_value());
  CHECK(sol->ordering == DiniOrdering::Reversed);
  // The theta quadrature does not close symbolically; phi, psi witnesses certify u.
  CHECK(sol->status == VerificationStatus::VerifiedOnWitnesses);
  CHECK_FALSE(sol->witness_log.empty());

  // Explicit witnesses phi = t, psi = z give a polynomial solution.
  const DiniFrame r = dini_frame(kModel, DiniOrdering::Reversed);
  const DiniStep s = dini_transform(r, Expr(0), Expr(0));
  const std::map<std::string, FunctionWitness> w{
      {"phi", FunctionWitness{{"s", "t"}, parse_expression("t", {"s", "t"})}},
      {"psi", FunctionWitness{{"s", "t"}, parse_expression("s", {"s", "t"})}},
  };
  const Expr u = dini_witness_solution(kModel, r, s, sol->v, w);
  CHECK(apply(kModel, u).is_zero());
  CHECK(is_closed_form(u));
}

TEST_CASE("property: planted instances are recovered (10 operators)") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10; ++i) {
    const testing::PlantedInstance p = testing::planted_instance(rng);
    REQUIRE(apply(p.op, p.kernel).is_zero());
    bool matched = false;
    for (DiniOrdering o : {DiniOrdering::Forward, DiniOrdering::Reversed}) {
      const DiniFrame f = dini_frame(p.op, o);
      if (!(f.S1 == p.S1 && f.S2 == p.S2)) continue;
      matched = true;
      REQUIRE(beta_equation_residual(f, p.beta).is_zero());
      REQUIRE(closure_constraint(f, p.beta).is_zero());
      BetaSearchOptions opts;
      opts.closure = true;
      const std::vector<Expr> betas = solve_beta(f, opts);
      REQUIRE_MESSAGE(contains(betas, p.beta), p.op.str());
      const auto alpha = solve_alpha(f, p.beta);
      REQUIRE(alpha.has_value());
      for (const Expr& e : system_residuals(f, *alpha, p.beta)) REQUIRE(e.is_zero());
      const DiniStep s = dini_transform(f, *alpha, p.beta);
      REQUIRE(zero_operator(closure_residual(f, s)));
    }
    REQUIRE_MESSAGE(matched, p.op.str());
  }
}
