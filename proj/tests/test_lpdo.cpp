#include <doctest.h>

#include "cascade/first_order.hpp"
#include "cascade/lpdo.hpp"
#include "cascade/parse.hpp"
#include "support/generators.hpp"

using namespace cascade;
using cascade::testing::random_field;
using cascade::testing::random_operator;
using cascade::testing::random_poly;

namespace {
const Variables kXY{"x", "y"};
const Variables kXYZ{"x", "y", "z"};
Expr P(const std::string& s, const Variables& v = kXYZ) { return parse_expression(s, v); }
LinearOperator Op(const std::string& s, const Variables& v = kXYZ) { return parse_operator(s, v); }
FirstOrderOperator F1(const std::string& s, const Variables& v = kXYZ) {
  return FirstOrderOperator::from_operator(Op(s, v));
}
const LinearOperator kModel = parse_operator("Dx*Dy + x*Dx*Dz - Dz", kXYZ);
}  // namespace

TEST_CASE("apply examples") {
  CHECK(apply(Op("Dx"), P("x^2")) == P("2*x"));
  CHECK(apply(kModel, P("x*z")).is_zero());
  CHECK(apply(Op("Dx*Dy - 2/(x+y)^2", kXY), P("1/(x+y)", kXY)).is_zero());
}

TEST_CASE("compose examples") {
  CHECK(compose(Op("Dx"), Op("x")) == Op("x*Dx + 1"));
  CHECK(compose(Op("Dx"), Op("Dy")) == Op("Dx*Dy"));
  const LinearOperator c = compose(Op("Dy + x*Dz"), Op("Dx"));
  CHECK(c == Op("Dx*Dy + x*Dx*Dz"));
  CHECK(c - Op("Dz") == kModel);
}

TEST_CASE("commutator examples") {
  CHECK(commutator(F1("Dx"), F1("Dy + x*Dz")) == F1("Dz"));
  CHECK(commutator(F1("Dx"), F1("Dy")).has_zero_field());
  CHECK(commutator(F1("Dx"), F1("x*Dx")) == F1("Dx"));
}

TEST_CASE("principal symbol examples") {
  CHECK(principal_symbol(Op("Dx*Dy - 2/(x+y)^2", kXY)).str() == "xi1*xi2");
  const SymbolPolynomial s = principal_symbol(kModel);
  CHECK(s.coefficient(0, 1) == Expr(1));
  CHECK(s.coefficient(0, 2) == P("x"));
  CHECK(s.terms().size() == 2);
  const SymbolPolynomial w = principal_symbol(Op("Dx^2 - Dy^2", kXY));
  CHECK(w.coefficient(0, 0) == Expr(1));
  CHECK(w.coefficient(1, 1) == Expr(-1));
  CHECK_THROWS_AS(principal_symbol(Op("Dx + y", kXY)), Error);
}

TEST_CASE("factor_symbol examples") {
  const auto a = factor_symbol(principal_symbol(Op("Dx*Dy", kXY)));
  REQUIRE(a.status == FactorStatus::Factored);
  CHECK(a.factors->first == F1("Dx", kXY));
  CHECK(a.factors->second == F1("Dy", kXY));

  const auto b = factor_symbol(principal_symbol(kModel));
  REQUIRE(b.status == FactorStatus::Factored);
  CHECK(b.factors->first == F1("Dx"));
  CHECK(b.factors->second == F1("Dy + x*Dz"));

  CHECK(factor_symbol(principal_symbol(Op("Dx^2 + Dy^2", kXY))).status == FactorStatus::NotFactorable);
  CHECK(factor_symbol(principal_symbol(Op("Dx^2 + 2*Dx*Dy + Dy^2", kXY))).status == FactorStatus::Repeated);

  const auto c = factor_symbol(principal_symbol(Op("Dx^2 - x^2*Dy^2", kXY)));
  REQUIRE(c.status == FactorStatus::Factored);
  CHECK(SymbolPolynomial::product(c.factors->first, c.factors->second) ==
        principal_symbol(Op("Dx^2 - x^2*Dy^2", kXY)));
}

TEST_CASE("decompose_in_frame examples") {
  const std::array<FirstOrderOperator, 3> frame{F1("Dx"), F1("Dy + x*Dz"), F1("Dz")};
  auto c = decompose_in_frame(F1("Dz"), frame);
  CHECK(c[0] == Expr(0));
  CHECK(c[1] == Expr(0));
  CHECK(c[2] == Expr(1));
  const FirstOrderOperator zero = commutator(F1("Dy + x*Dz"), F1("-Dz"));
  c = decompose_in_frame(zero, frame);
  CHECK((c[0].is_zero() && c[1].is_zero() && c[2].is_zero()));
  c = decompose_in_frame(F1("Dy"), frame);
  CHECK(c[0] == Expr(0));
  CHECK(c[1] == Expr(1));
  CHECK(c[2] == P("-x"));
  CHECK_THROWS_AS(decompose_in_frame(F1("Dz"), {F1("Dx"), F1("Dy"), F1("Dx + Dy")}), Error);
}

TEST_CASE("first-order solver examples") {
  auto s = solve_first_order_heuristic(F1("Dx"), Expr(0));
  REQUIRE(s.supported);
  CHECK(s.general == P("F(y, z)"));
  s = solve_first_order_heuristic(F1("Dy + x*Dz"), Expr(0));
  REQUIRE(s.supported);
  CHECK(s.general == P("F(x, x*y - z)"));
  FirstOrderOptions o;
  o.degree_bound = 1;
  CHECK_FALSE(solve_first_order_heuristic(F1("x*Dx + y*Dy", kXY), Expr(0), o).supported);
  o.rational_invariants = true;
  s = solve_first_order_heuristic(F1("x*Dx + y*Dy", kXY), Expr(0), o);
  REQUIRE(s.supported);
  CHECK(s.general == P("F(y/x)", kXY));
  CHECK(apply(Op("x*Dx + y*Dy", kXY), s.general).is_zero());
}

TEST_CASE("gauge conjugation") {
  const LinearOperator L = Op("Dx*Dy + y*Dx - 3", kXY);
  const Expr lambda = P("exp(x*y)", kXY);
  const Expr u = P("F(x, y)", kXY);
  CHECK(apply(gauge(L, lambda), u) == apply(L, lambda * u) / lambda);
}

TEST_CASE("property: composition agrees with successive application (200 triples)") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Variables& v = i % 2 ? kXY : kXYZ;
    const LinearOperator A = random_operator(rng, v, 2, 1, 0.4);
    const LinearOperator B = random_operator(rng, v, 2, 1, 0.4);
    const Expr u = random_poly(rng, v, 2) * P(i % 2 ? "F(x*y, x - y)" : "F(x, y*z)", v) +
                   P(i % 2 ? "exp(x - 2*y)" : "ln(1 + x^2)", v);
    REQUIRE((apply(compose(A, B), u) - apply(A, apply(B, u))).is_zero());
  }
}

TEST_CASE("property: composition is associative (100 triples)") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    const Variables& v = i % 2 ? kXY : kXYZ;
    const LinearOperator A = random_operator(rng, v, 2, 1, 0.4);
    const LinearOperator B = random_operator(rng, v, 2, 1, 0.4);
    const LinearOperator C = random_operator(rng, v, 2, 1, 0.4);
    REQUIRE(compose(A, compose(B, C)) == compose(compose(A, B), C));
  }
}

TEST_CASE("property: commutator antisymmetry and symbol multiplicativity (200 pairs)") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    const Variables& v = i % 2 ? kXY : kXYZ;
    const FirstOrderOperator a = random_field(rng, v, 2);
    const FirstOrderOperator b = random_field(rng, v, 2);
    const FirstOrderOperator ab = commutator(a, b);
    const FirstOrderOperator ba = commutator(b, a);
    REQUIRE((ab + ba).has_zero_field());
    REQUIRE(compose(a.to_operator(), b.to_operator()) - compose(b.to_operator(), a.to_operator()) ==
            ab.to_operator());
    REQUIRE(principal_symbol(compose(a.to_operator(), b.to_operator())) == SymbolPolynomial::product(a, b));
  }
}

TEST_CASE("property: factor_symbol round-trip (200 products)") {
  std::mt19937_64 rng(14);
  int factored = 0;
  for (int i = 0; i < 200; ++i) {
    const Variables& v = i % 2 ? kXY : kXYZ;
    const FirstOrderOperator a = random_field(rng, v, 1);
    const FirstOrderOperator b = random_field(rng, v, 1);
    const SymbolPolynomial s = SymbolPolynomial::product(a, b);
    const SymbolFactorization f = factor_symbol(s);
    if (f.status == FactorStatus::Repeated) continue;
    REQUIRE_MESSAGE(f.status == FactorStatus::Factored, s.str());
    ++factored;
    REQUIRE(principal_symbol(compose(f.factors->first.to_operator(), f.factors->second.to_operator())) == s);
  }
  CHECK(factored > 150);
}

TEST_CASE("property: supported first-order solutions are annihilated (60 fields)") {
  std::mt19937_64 rng(15);
  int supported = 0;
  for (int i = 0; i < 60; ++i) {
    const Variables& v = i % 2 ? kXY : kXYZ;
    // Triangular fields: D_x plus lower coefficients depending on earlier variables.
    std::vector<Expr> field{Expr(1)};
    for (std::size_t j = 1; j < v.size(); ++j) {
      const Variables earlier(v.begin(), v.begin() + j);
      field.push_back(random_poly(rng, earlier, 2, 0.5));
    }
    const Expr b0 = i % 3 == 0 ? random_poly(rng, {"x"}, 1) : Expr(0);
    const Expr rhs = i % 4 == 0 ? random_poly(rng, v, 1) : Expr(0);
    const FirstOrderOperator w(v, field, b0);
    const FirstOrderSolution s = solve_first_order_heuristic(w, rhs);
    if (!s.supported) continue;
    ++supported;
    REQUIRE_MESSAGE((w.apply(s.general) - rhs).is_zero(), w.str() << " -> " << s.general.str());
  }
  CHECK(supported > 40);
}
