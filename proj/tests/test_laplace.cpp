#include <doctest.h>

#include "cascade/laplace.hpp"
#include "cascade/parse.hpp"
#include "support/generators.hpp"

using namespace cascade;
using cascade::testing::random_form;

namespace {
const Variables kXY{"x", "y"};
Expr P(const std::string& s) { return parse_expression(s, kXY); }
LinearOperator Op(const std::string& s) { return parse_operator(s, kXY); }
LinearOperator inverse_square(int n) { return Op("Dx*Dy - " + std::to_string(n * (n + 1)) + "/(x+y)^2"); }

bool zero_operator(const LinearOperator& op) {
  for (const auto& [m, c] : op.terms())
    if (!expr_is_zero(c)) return false;
  return true;
}

CharacteristicForm form_of(const testing::RandomForm& f) { return characteristic_form(f.op, f.X1, f.X2); }
}  // namespace

TEST_CASE("characteristic form examples") {
  auto f = characteristic_form(Op("Dx*Dy"));
  CHECK((f.alpha1.is_zero() && f.alpha2.is_zero() && f.alpha3.is_zero() && f.P.is_zero() && f.Q.is_zero()));
  f = characteristic_form(Op("Dx*Dy + y*Dy"));
  CHECK(f.X1.str() == "Dx");
  CHECK(f.X2.str() == "Dy");
  CHECK(f.alpha1.is_zero());
  CHECK(f.alpha2 == P("y"));
  CHECK(f.alpha3.is_zero());
  for (int n = 1; n <= 4; ++n) {
    f = characteristic_form(inverse_square(n));
    CHECK((f.alpha1.is_zero() && f.alpha2.is_zero()));
    CHECK(f.alpha3 == P(std::to_string(-n * (n + 1)) + "/(x+y)^2"));
  }
  CHECK_THROWS_AS(characteristic_form(Op("Dx^2 + Dy^2")), Error);
  CHECK_THROWS_AS(characteristic_form(Op("Dx^2 + 2*Dx*Dy + Dy^2")), Error);
}

TEST_CASE("characteristic form reproduces the operator in both orderings") {
  const LinearOperator L = Op("Dx^2 - x^2*Dy^2 + y*Dx - 1");
  const auto f = characteristic_form(L);
  const LinearOperator X1 = f.X1.to_operator(), X2 = f.X2.to_operator();
  CHECK(zero_operator(compose(X1, X2) + f.alpha1 * X1 + f.alpha2 * X2 + LinearOperator::scalar(kXY, f.alpha3) - L));
  CHECK(zero_operator(compose(X2, X1) + f.alphabar1 * X1 + f.alphabar2 * X2 + LinearOperator::scalar(kXY, f.alpha3) -
                      L));
  const FirstOrderOperator c = commutator(f.X1, f.X2);
  CHECK((c - (f.X1.scaled(f.P) + f.X2.scaled(f.Q))).has_zero_field());
}

TEST_CASE("invariant examples") {
  auto inv = laplace_invariants(characteristic_form(Op("Dx*Dy")));
  CHECK((inv.h.is_zero() && inv.k.is_zero()));
  for (int n = 1; n <= 4; ++n) {
    inv = laplace_invariants(characteristic_form(inverse_square(n)));
    const Expr expected = P(std::to_string(n * (n + 1)) + "/(x+y)^2");
    CHECK(inv.h == expected);
    CHECK(inv.k == expected);
  }
  inv = laplace_invariants(characteristic_form(Op("Dx*Dy + y*Dy")));
  CHECK(inv.h.is_zero());
  CHECK(inv.k == Expr(1));
}

TEST_CASE("partial factorization examples") {
  for (const char* op : {"Dx*Dy - 2/(x+y)^2", "Dx*Dy + y*Dy", "Dx*Dy"}) {
    const auto [r1, r2] = partial_factorization_residuals(characteristic_form(Op(op)));
    CHECK(zero_operator(r1));
    CHECK(zero_operator(r2));
  }
  const auto f = characteristic_form(Op("Dx*Dy + y*Dy"));
  CHECK(compose(Op("Dx + y"), Op("Dy")) == Op("Dx*Dy + y*Dy"));
  CHECK(f.alpha2 == P("y"));
}

TEST_CASE("transform examples") {
  const auto f = characteristic_form(inverse_square(1));
  const auto f1 = x1_transform(f);
  CHECK(laplace_invariants(f1).h.is_zero());
  CHECK(laplace_invariants(f1).k == laplace_invariants(f).h);
  const auto fm1 = x2_transform(f);
  CHECK(laplace_invariants(fm1).k.is_zero());
  CHECK(laplace_invariants(fm1).h == laplace_invariants(f).k);
  CHECK_THROWS_AS(x1_transform(characteristic_form(Op("Dx*Dy"))), Error);
  const auto g = x2_transform(characteristic_form(Op("Dx*Dy + y*Dy")));
  CHECK(laplace_invariants(g).h == Expr(1));
}

TEST_CASE("chain examples") {
  auto r = run_chain(inverse_square(2), 10);
  REQUIRE(r.N.has_value());
  REQUIRE(r.K.has_value());
  CHECK(*r.N == 2);
  CHECK(*r.K == 2);
  r = run_chain(Op("Dx*Dy - 1/(x+y)^2"), 10);
  CHECK_FALSE(r.terminated());
  r = run_chain(Op("Dx*Dy"), 10);
  CHECK(r.N == 0);
  CHECK(r.K == 0);
}

TEST_CASE("inverse-square chains are symmetric") {
  for (int n = 1; n <= 4; ++n) {
    const ChainReport r = run_chain(inverse_square(n), 10);
    REQUIRE(r.N == n);
    REQUIRE(r.K == n);
    // h_(-i-1) = k_(-i); the last pair is h_(n) = 0 = k_(-n).
    for (int i = 0; i < n; ++i) CHECK(r.at(i).inv.h == r.at(-i - 1).inv.h);
    CHECK(r.at(n).inv.h.is_zero());
    CHECK(r.at(-n).inv.k.is_zero());
    for (const ChainLink& l : r.links) CHECK(l.form.X1.str() == "Dx");
  }
}

TEST_CASE("solution examples") {
  SolutionCertificate c = build_solution(run_chain(Op("Dx*Dy"), 10));
  CHECK(c.solution == P("F(x) + G(y)"));
  CHECK(verify_solution(Op("Dx*Dy"), c).status == VerificationStatus::Verified);

  c = build_solution(run_chain(inverse_square(1), 10));
  // Independent oracle: the classical solution, checked by substitution.
  CHECK(apply(inverse_square(1), P("F'(x) + G'(y) - 2*(F(x) + G(y))/(x + y)")).is_zero());
  CHECK(verify_solution(inverse_square(1), c).status == VerificationStatus::Verified);
  CHECK(c.quadrature_free);
  CHECK(c.f_coefficients.size() == 2);
  CHECK(c.g_coefficients.size() == 2);

  c = build_solution(run_chain(Op("Dx*Dy + y*Dy"), 10));
  CHECK_FALSE(c.quadrature_free);
  CHECK(c.solution == P("F(x) + int(G(y)*exp(-x*y), y)"));
  CHECK(verify_solution(Op("Dx*Dy + y*Dy"), c).status == VerificationStatus::Verified);
}

TEST_CASE("verification rejects a corrupted certificate") {
  const VerificationReport v = verify_solution(inverse_square(1), P("F'(x) + G'(y) - 2*G(y)/(x + y)"));
  CHECK(v.status == VerificationStatus::Failed);
  CHECK_FALSE(v.residual.is_zero());
}

TEST_CASE("property: partial factorizations and transformed invariants (50 forms)") {
  std::mt19937_64 rng(31);
  int transformed = 0;
  for (int i = 0; i < 50; ++i) {
    const auto f = form_of(random_form(rng));
    const auto [r1, r2] = partial_factorization_residuals(f);
    REQUIRE(zero_operator(r1));
    REQUIRE(zero_operator(r2));
    const LaplaceInvariants inv = laplace_invariants(f);
    if (!inv.h.is_zero()) {
      REQUIRE(laplace_invariants(x1_transform(f)).k == inv.h);
      ++transformed;
    }
    if (!inv.k.is_zero()) REQUIRE(laplace_invariants(x2_transform(f)).h == inv.k);
  }
  CHECK(transformed > 40);
}

TEST_CASE("property: X2-transformation reverses the X1-transformation up to gauge (20 forms)") {
  std::mt19937_64 rng(32);
  int checked = 0;
  for (int i = 0; checked < 20 && i < 60; ++i) {
    const auto f = form_of(random_form(rng));
    const LaplaceInvariants inv = laplace_invariants(f);
    if (inv.h.is_zero()) continue;
    const auto f1 = x1_transform(f);
    if (laplace_invariants(f1).k.is_zero()) continue;
    const LaplaceInvariants back = laplace_invariants(x2_transform(f1));
    REQUIRE(back.h == inv.h);
    REQUIRE(back.k == inv.k);
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("property: closed formula for the transformed invariant with X1 = Dx, X2 = Dy (20 forms)") {
  std::mt19937_64 rng(33);
  int checked = 0;
  for (int i = 0; checked < 20 && i < 60; ++i) {
    testing::RandomForm r = random_form(rng);
    r.X1 = FirstOrderOperator(kXY, {Expr(1), Expr(0)});
    r.op = Op("Dx*Dy") + r.alpha1 * r.X1.to_operator() + r.alpha2 * r.X2.to_operator() +
           LinearOperator::scalar(kXY, r.alpha3);
    const auto f = form_of(r);
    if (laplace_invariants(f).h.is_zero()) continue;
    const Expr recomputed = laplace_invariants(x1_transform(f)).h;
    REQUIRE(h1_closed_formula(f) == recomputed);
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("property: invariants are gauge invariant (20 forms)") {
  std::mt19937_64 rng(34);
  const char* lambdas[] = {"exp(x*y)", "x + y + 1", "exp(x - y^2)/(1 + x^2)"};
  for (int i = 0; i < 20; ++i) {
    const testing::RandomForm r = random_form(rng);
    const auto f = form_of(r);
    const auto g = characteristic_form(gauge(r.op, P(lambdas[i % 3])), r.X1, r.X2);
    const LaplaceInvariants a = laplace_invariants(f), b = laplace_invariants(g);
    REQUIRE(expr_is_zero(a.h - b.h));
    REQUIRE(expr_is_zero(a.k - b.k));
  }
}
