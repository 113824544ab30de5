// Random expressions, operators, characteristic forms and planted Dini
// instances for the property suites and the acceptance binary.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "cascade/calculus.hpp"
#include "cascade/dini.hpp"
#include "cascade/laplace.hpp"
#include "cascade/lpdo.hpp"

namespace cascade::testing {

inline Expr var(const std::string& v) { return Expr::variable(v); }

inline Rational small_rational(std::mt19937_64& rng, int range = 5) { return random_rational(rng, range); }

/// Dense-ish random polynomial of total degree <= degree; each monomial is kept with probability density.
/// With integral set, coefficients are integers in [-range, range].
inline Expr random_poly(std::mt19937_64& rng, const Variables& vars, int degree, double density = 0.5,
                        int range = 5, bool integral = false) {
  std::bernoulli_distribution keep(density);
  Expr out(0);
  std::vector<int> e(vars.size(), 0);
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i == vars.size()) {
      if (!keep(rng)) return;
      Rational c = small_rational(rng, range);
      if (integral) c = std::uniform_int_distribution<int>(-range, range)(rng);
      if (c == 0) return;
      Expr m(c);
      for (std::size_t j = 0; j < vars.size(); ++j) m = m * var(vars[j]).pow(e[j]);
      out = out + m;
      return;
    }
    for (int d = 0; d <= left; ++d) {
      e[i] = d;
      self(self, i + 1, left - d);
    }
    e[i] = 0;
  };
  rec(rec, 0, degree);
  return out;
}

inline Expr random_nonzero_poly(std::mt19937_64& rng, const Variables& vars, int degree, double density = 0.5) {
  for (;;) {
    Expr p = random_poly(rng, vars, degree, density);
    if (!p.is_zero()) return p;
  }
}

/// Numerator and denominator of total degree <= degree.
inline Expr random_rational_function(std::mt19937_64& rng, const Variables& vars, int degree, bool integral = false) {
  std::bernoulli_distribution poly_only(0.3);
  Expr num = random_poly(rng, vars, degree, 0.5, integral ? 3 : 5, integral);
  if (poly_only(rng)) return num;
  Expr den(0);
  while (den.is_zero()) den = random_poly(rng, vars, degree, 0.5, integral ? 3 : 5, integral);
  return num / den;
}

/// Random operator of order <= order with polynomial coefficients.
inline LinearOperator random_operator(std::mt19937_64& rng, const Variables& vars, int order, int coeff_degree,
                                      double density = 0.5) {
  LinearOperator op(vars);
  std::bernoulli_distribution keep(density);
  std::vector<int> e(vars.size(), 0);
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i == vars.size()) {
      if (keep(rng)) op.add_term(e, random_poly(rng, vars, coeff_degree, 0.6));
      return;
    }
    for (int d = 0; d <= left; ++d) {
      e[i] = d;
      self(self, i + 1, left - d);
    }
    e[i] = 0;
  };
  rec(rec, 0, order);
  return op;
}

inline FirstOrderOperator random_field(std::mt19937_64& rng, const Variables& vars, int coeff_degree) {
  for (;;) {
    std::vector<Expr> f;
    for (std::size_t i = 0; i < vars.size(); ++i) f.push_back(random_poly(rng, vars, coeff_degree, 0.5));
    FirstOrderOperator w(vars, f);
    if (!w.has_zero_field()) return w;
  }
}

/// L = X1 X2 + alpha1 X1 + alpha2 X2 + alpha3 in (x, y) with X1 = Dx + p Dy,
/// X2 = Dy, p polynomial of degree <= 1, alphas rational of degree <= 2.
struct RandomForm {
  LinearOperator op;
  FirstOrderOperator X1, X2;
  Expr alpha1, alpha2, alpha3;
};

inline RandomForm random_form(std::mt19937_64& rng) {
  const Variables v{"x", "y"};
  RandomForm f;
  f.X1 = FirstOrderOperator(v, {Expr(1), random_poly(rng, v, 1, 0.4, 2, true)});
  f.X2 = FirstOrderOperator(v, {Expr(0), Expr(1)});
  f.alpha1 = random_rational_function(rng, v, 2, true);
  f.alpha2 = random_rational_function(rng, v, 2, true);
  f.alpha3 = random_rational_function(rng, v, 2, true);
  f.op = compose(f.X1.to_operator(), f.X2.to_operator()) + f.alpha1 * f.X1.to_operator() +
         f.alpha2 * f.X2.to_operator() + LinearOperator::scalar(v, f.alpha3);
  return f;
}

/// Planted Dini instance in (x, y, z):
///   S2 = Dx + f(y) Dz, W = Dz, w = a x + b z + e(y),
///   beta* = (a + b f) z + kappa(x, y), so that B = W + w commutes with A = S2 + beta*;
///   S1 = Dy + s Dz, L = (S1 + alpha*) A + q B + r A with constants q != 0, r.
/// Then V + b = q B + r A satisfies the closure identity with mu = nu = 0.
struct PlantedInstance {
  LinearOperator op;
  FirstOrderOperator S1, S2;
  Expr alpha, beta;
  /// Common kernel element of A and B, hence of L.
  Expr kernel;
};

inline PlantedInstance planted_instance(std::mt19937_64& rng) {
  const Variables v{"x", "y", "z"};
  const Expr x = var("x"), y = var("y"), z = var("z");
  PlantedInstance p;
  const Expr f = random_poly(rng, {"y"}, 1, 0.7);
  const Rational a = small_rational(rng), b = small_rational(rng);
  const Expr e = random_poly(rng, {"y"}, 1, 0.6);
  const Expr kappa = random_poly(rng, {"x", "y"}, 2, 0.4);
  Rational q = small_rational(rng);
  if (q == 0) q = 1;
  const Rational r = small_rational(rng);
  Expr s = random_poly(rng, v, 1, 0.5);
  if (s.is_zero()) s = Expr(1);
  p.S2 = FirstOrderOperator(v, {Expr(1), Expr(0), f});
  p.S1 = FirstOrderOperator(v, {Expr(0), Expr(1), s});
  p.beta = (Expr(a) + Expr(b) * f) * z + kappa;
  p.alpha = random_poly(rng, v, 2, 0.3);
  const Expr w = Expr(a) * x + Expr(b) * z + e;
  const LinearOperator A = p.S2.with_zeroth(p.beta).to_operator();
  const LinearOperator B = FirstOrderOperator(v, {Expr(0), Expr(0), Expr(1)}, w).to_operator();
  p.op = compose(p.S1.with_zeroth(p.alpha).to_operator(), A) + Expr(q) * B + Expr(r) * A;
  // Phi_z = -w, Phi_x + f Phi_z = -beta*.
  const Expr chi = f * Expr(a) * x * x / Expr(2) + f * e * x - integrate_heuristic(kappa, "x");
  const Expr phi = -(Expr(a) * x * z + Expr(b) * z * z / Expr(2) + e * z) + chi;
  p.kernel = Expr::from_atom(make_exp_atom(phi));
  return p;
}

}  // namespace cascade::testing
