#include "cascade/dini.hpp"

#include <algorithm>
#include <random>

#include "cascade/linsolve.hpp"

namespace cascade {
namespace {

std::vector<Expr> monomial_basis(const Variables& vars, int degree) {
  std::vector<Expr> out;
  for (int d = 0; d <= degree; ++d) {
    for (int i = d; i >= 0; --i)
      for (int j = d - i; j >= 0; --j) {
        const int k = d - i - j;
        if (vars.size() == 2 && k != 0) continue;
        Expr m = var(vars[0]).pow(i) * var(vars[1]).pow(j);
        if (vars.size() == 3) m *= var(vars[2]).pow(k);
        out.push_back(m);
      }
  }
  return out;
}

// sum_i c_i m_i with fresh unknown coefficients.
Expr ansatz(const std::vector<Expr>& basis, const std::vector<std::string>& unknowns) {
  Expr out(0);
  for (std::size_t i = 0; i < basis.size(); ++i) out += var(unknowns[i]) * basis[i];
  return out;
}

Expr instantiate_unknowns(const Expr& e, const std::map<std::string, Rational>& values) {
  std::map<std::string, Expr> m;
  for (const auto& [k, v] : values) m[k] = Expr(v);
  return substitute(e, m);
}

bool operator_is_zero(const LinearOperator& op) {
  return std::all_of(op.terms().begin(), op.terms().end(), [](const auto& t) { return expr_is_zero(t.second); });
}

}  // namespace

const char* to_string(DiniOrdering o) { return o == DiniOrdering::Forward ? "forward" : "reversed"; }

DiniFrame dini_frame(const LinearOperator& op, DiniOrdering ordering) {
  if (op.vars().size() != 3) throw Error(ErrorKind::Precondition, "Dini frames need three independent variables");
  const SymbolPolynomial sym = principal_symbol(op);
  const SymbolFactorization fac = factor_symbol(sym);
  if (fac.status == FactorStatus::NotFactorable)
    throw Error(ErrorKind::Hyperbolicity, "principal symbol " + sym.str() + " is not factorable over the coefficient field");
  if (fac.status == FactorStatus::Repeated)
    throw Error(ErrorKind::Hyperbolicity, "principal symbol " + sym.str() + " has proportional factors");
  DiniFrame f;
  f.op = op;
  f.ordering = ordering;
  f.S1 = fac.factors->first;
  f.S2 = fac.factors->second;
  if (ordering == DiniOrdering::Reversed) std::swap(f.S1, f.S2);
  auto [t, a] = first_order_remainder(op, f.S1, f.S2);
  f.T = t;
  f.a = a;
  if (expr_is_zero(field_determinant({f.S1, f.S2, f.T})))
    throw Error(ErrorKind::Genericity, "S1 = " + f.S1.str() + ", S2 = " + f.S2.str() + ", T = " + f.T.str() +
                                           " do not span the tangent space (operator is not generic)");
  const std::array<FirstOrderOperator, 3> basis{f.S1, f.S2, f.T};
  const auto kmn = decompose_in_frame(commutator(f.S2, f.T), basis);
  f.K = kmn[0];
  f.M = kmn[1];
  f.N = kmn[2];
  const auto pqr = decompose_in_frame(commutator(f.S1, f.S2), basis);
  f.P = pqr[0];
  f.Q = pqr[1];
  f.R = pqr[2];
  return f;
}

Expr beta_equation_residual(const DiniFrame& f, const Expr& beta) {
  return f.S2.apply(beta) - (beta * beta * f.R + (f.N + f.P) * beta + f.K);
}

Expr closure_constraint(const DiniFrame& f, const Expr& beta) {
  const Expr nu = -(f.N + beta * f.R);
  const Expr s1b = f.S1.apply(beta);
  return beta * s1b - f.T.apply(beta) + f.S2.apply(f.a) - f.S2.apply(s1b) + nu * (f.a - s1b) -
         f.Q * beta * beta - f.M * beta;
}

std::array<Expr, 4> system_residuals(const DiniFrame& f, const Expr& alpha, const Expr& beta) {
  const Expr nu = -(f.N + beta * f.R);
  const Expr s2a = f.S2.apply(alpha);
  const Expr mu = nu * alpha + s2a - beta * f.Q - f.M;
  const Expr s1b = f.S1.apply(beta);
  return {
      f.K + beta * f.P - f.S2.apply(beta) - nu * beta,
      f.M - s2a + beta * f.Q - (nu * alpha - mu),
      f.N + beta * f.R + nu,
      beta * s1b - f.T.apply(beta) + f.S2.apply(f.a) - beta * s2a - f.S2.apply(s1b) +
          nu * (f.a - alpha * beta - s1b) + mu * beta,
  };
}

std::vector<Expr> solve_beta(const DiniFrame& f, const BetaSearchOptions& opts) {
  std::vector<Expr> out;
  auto consider = [&](const Expr& beta) {
    if (std::find(out.begin(), out.end(), beta) != out.end()) return;
    if (!expr_is_zero(beta_equation_residual(f, beta))) return;
    if (opts.closure && !expr_is_zero(closure_constraint(f, beta))) return;
    out.push_back(beta);
  };
  consider(Expr(0));

  const Variables& vars = f.op.vars();
  // Polynomial ansatz.
  {
    const auto basis = monomial_basis(vars, opts.degree_bound);
    const auto unknowns = linsolve::fresh_unknowns("_b", basis.size());
    const std::set<std::string> uset(unknowns.begin(), unknowns.end());
    const Expr beta = ansatz(basis, unknowns);
    auto eqs = linsolve::coefficient_equations(beta_equation_residual(f, beta), uset);
    if (opts.closure) {
      auto more = linsolve::coefficient_equations(closure_constraint(f, beta), uset);
      eqs.insert(eqs.end(), more.begin(), more.end());
    }
    for (const auto& sol : linsolve::solve_polynomial_system(eqs, unknowns)) consider(instantiate_unknowns(beta, sol));
  }
  // Linearizing substitution for the Riccati-type equation.
  if (!expr_is_zero(f.R)) {
    const auto basis = monomial_basis(vars, opts.degree_bound);
    const auto unknowns = linsolve::fresh_unknowns("_g", basis.size());
    const Expr gamma = ansatz(basis, unknowns);
    const Expr s2g = f.S2.apply(gamma);
    const Expr lin = f.S2.apply(s2g) - (f.S2.apply(f.R) / f.R + f.N + f.P) * s2g + f.R * f.K * gamma;
    const auto eqs = linsolve::coefficient_equations(lin, {unknowns.begin(), unknowns.end()});
    const auto sys = linsolve::linear_system(eqs, unknowns);
    for (const auto& v : linsolve::nullspace(sys.a, basis.size())) {
      Expr g(0);
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) g += Expr(v[i]) * basis[i];
      const Expr s2 = f.S2.apply(g);
      if (g.is_zero() || s2.is_zero()) continue;
      consider(-s2 / (f.R * g));
      consider(s2 / g);
    }
  }
  return out;
}

std::optional<Expr> solve_alpha(const DiniFrame& f, const Expr& beta, int degree_bound) {
  if (!expr_is_zero(beta_equation_residual(f, beta))) return std::nullopt;
  auto all_zero = [&](const Expr& alpha) {
    for (const auto& r : system_residuals(f, alpha, beta))
      if (!expr_is_zero(r)) return false;
    return true;
  };
  if (all_zero(Expr(0))) return Expr(0);
  const auto basis = monomial_basis(f.op.vars(), degree_bound);
  const auto unknowns = linsolve::fresh_unknowns("_a", basis.size());
  const std::set<std::string> uset(unknowns.begin(), unknowns.end());
  const Expr alpha = ansatz(basis, unknowns);
  std::vector<Poly> eqs;
  for (const auto& r : system_residuals(f, alpha, beta)) {
    auto more = linsolve::coefficient_equations(r, uset);
    eqs.insert(eqs.end(), more.begin(), more.end());
  }
  for (const auto& sol : linsolve::solve_polynomial_system(eqs, unknowns)) {
    const Expr candidate = instantiate_unknowns(alpha, sol);
    if (all_zero(candidate)) return candidate;
  }
  return std::nullopt;
}

LinearOperator closure_residual(const DiniFrame& f, const DiniStep& s) {
  const LinearOperator vb = s.V.with_zeroth(s.b).to_operator();
  const LinearOperator sb = f.S2.with_zeroth(s.beta).to_operator();
  return compose(vb, sb) - compose(sb, vb) - s.mu * sb - s.nu * vb;
}

DiniStep dini_transform(const DiniFrame& f, const Expr& alpha, const Expr& beta) {
  DiniStep s;
  s.alpha = alpha;
  s.beta = beta;
  s.nu = -(f.N + beta * f.R);
  s.mu = s.nu * alpha + f.S2.apply(alpha) - beta * f.Q - f.M;
  s.V = f.T.pure() - f.S1.scaled(beta) - f.S2.scaled(alpha);
  s.b = f.a - alpha * beta - f.S1.apply(beta);
  if (!operator_is_zero(closure_residual(f, s)))
    throw Error(ErrorKind::Consistency, "closure identity fails for alpha = " + alpha.str() + ", beta = " + beta.str());
  const LinearOperator s1a = f.S1.with_zeroth(alpha).to_operator();
  s.L1 = compose(f.S2.with_zeroth(beta).to_operator(), s1a) + s.V.with_zeroth(s.b).to_operator() + s.nu * s1a -
         LinearOperator::scalar(f.op.vars(), s.mu);
  return s;
}

std::optional<Factorization> factor_operator(const LinearOperator& op) {
  if (op.order() != 2) return std::nullopt;
  const SymbolFactorization fac = factor_symbol(principal_symbol(op));
  if (fac.status != FactorStatus::Factored) return std::nullopt;
  const auto& [f1, f2] = *fac.factors;
  for (int swap = 0; swap < 2; ++swap) {
    const FirstOrderOperator& x = swap ? f2 : f1;
    const FirstOrderOperator& y = swap ? f1 : f2;
    const auto [r, r0] = first_order_remainder(op, x, y);
    Expr p(0), q(0);
    if (!r.has_zero_field()) {
      auto c = decompose_in_span(r, x, y);
      if (!c) continue;
      q = (*c)[0];
      p = (*c)[1];
    }
    if (!expr_is_zero(r0 - x.apply(q) - p * q)) continue;
    return Factorization{x.with_zeroth(p), y.with_zeroth(q)};
  }
  return std::nullopt;
}

DiniChainReport dini_chain(const LinearOperator& op, int max_steps, int degree_bound) {
  DiniChainReport report;
  for (DiniOrdering ordering : {DiniOrdering::Forward, DiniOrdering::Reversed}) {
    DiniChain chain;
    chain.ordering = ordering;
    LinearOperator current = op;
    for (int step = 1; step <= max_steps; ++step) {
      DiniLink link;
      link.step = step;
      try {
        link.frame = dini_frame(current, ordering);
      } catch (const Error& e) {
        if (step == 1 && (e.kind() == ErrorKind::Hyperbolicity || e.kind() == ErrorKind::Precondition)) throw;
        link.status = std::string("error: ") + e.what();
        chain.links.push_back(std::move(link));
        break;
      }
      const auto betas = solve_beta(link.frame, {degree_bound, true});
      if (betas.empty()) {
        link.status = "beta-search-failed";
        chain.links.push_back(std::move(link));
        break;
      }
      for (const auto& beta : betas) {
        if (auto alpha = solve_alpha(link.frame, beta, degree_bound)) {
          link.transform = dini_transform(link.frame, *alpha, beta);
          break;
        }
      }
      if (!link.transform) {
        link.status = "alpha-search-failed";
        chain.links.push_back(std::move(link));
        break;
      }
      link.factorization = factor_operator(link.transform->L1);
      link.status = link.factorization ? "factorable" : "transformed";
      current = link.transform->L1;
      const bool done = link.factorization.has_value();
      chain.links.push_back(std::move(link));
      if (done) break;
    }
    report.chains.push_back(std::move(chain));
  }
  return report;
}

Expr factored_general_solution(const Factorization& fac, const std::string& phi, const std::string& psi) {
  FirstOrderOptions o;
  o.function_name = phi;
  const auto w = solve_first_order_heuristic(fac.left, Expr(0), o);
  if (!w.supported) throw Error(ErrorKind::Unsupported, "cannot integrate " + fac.left.str() + " (" + w.reduced_system + ")");
  o.function_name = psi;
  const auto v = solve_first_order_heuristic(fac.right, w.general, o);
  if (!v.supported) throw Error(ErrorKind::Unsupported, "cannot integrate " + fac.right.str() + " (" + v.reduced_system + ")");
  return v.general;
}

BackSubstitution back_substitute(const DiniStep& step, const Expr& v, const DiniFrame& f, const std::string& theta) {
  FirstOrderOptions o;
  o.function_name = theta;
  const auto first = solve_first_order_heuristic(f.S2.with_zeroth(step.beta), v, o);
  if (!first.supported)
    throw Error(ErrorKind::Unsupported, "cannot integrate (S2 + beta)u = v: " + first.reduced_system);
  const Variables& vars = f.op.vars();
  Variables reduced;
  for (const auto& inv : first.invariants) {
    const std::string* name = inv.as_variable();
    if (!name) throw Error(ErrorKind::Unsupported, "first integrals of S2 are not coordinates: " + inv.str());
    reduced.push_back(*name);
  }
  Variables eliminated;
  for (const auto& x : vars)
    if (std::find(reduced.begin(), reduced.end(), x) == reduced.end()) eliminated.push_back(x);

  const Expr e = first.integrating_factor;
  const Expr up = first.particular;
  const Expr r = -(f.S1.apply(v) + step.alpha * v) - (step.V.apply(up) + step.b * up);
  std::vector<Expr> field;
  for (const auto& x : reduced) {
    const std::size_t i = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), x) - vars.begin());
    field.push_back(step.V.coefficient(i));
  }
  const Expr zeroth = step.V.apply(e) / e + step.b;
  const Expr rhs = r / e;
  auto blocked = [&](const Expr& x) {
    return std::any_of(eliminated.begin(), eliminated.end(), [&](const std::string& name) { return depends_on(x, name); });
  };
  for (const auto& c : field)
    if (blocked(c)) throw Error(ErrorKind::Unsupported, "V does not reduce to the first integrals of S2");
  if (blocked(zeroth) || blocked(rhs))
    throw Error(ErrorKind::Unsupported, "reduced equation for theta depends on the eliminated variable (quadratures do not close)");

  const FirstOrderOperator reduced_op(reduced, field, zeroth);
  Expr big_theta;
  std::string detail;
  if (reduced_op.has_zero_field()) {
    if (expr_is_zero(zeroth)) {
      if (!expr_is_zero(rhs)) throw Error(ErrorKind::Consistency, "incompatible system for u");
      std::vector<Expr> args;
      for (const auto& x : reduced) args.push_back(var(x));
      big_theta = func(theta, args);
      detail = "theta free";
    } else {
      big_theta = rhs / zeroth;
      detail = "theta determined algebraically";
    }
  } else {
    const auto second = solve_first_order_heuristic(reduced_op, rhs, o);
    if (!second.supported) throw Error(ErrorKind::Unsupported, "cannot integrate the reduced equation: " + second.reduced_system);
    big_theta = second.general;
    detail = "theta from " + reduced_op.str() + " = " + rhs.str();
  }
  return {up + e * big_theta, detail};
}

Expr dini_witness_solution(const LinearOperator& /*op*/, const DiniFrame& f, const DiniStep& step,
                           const Expr& v_symbolic, const std::map<std::string, FunctionWitness>& w) {
  return back_substitute(step, instantiate_functions(v_symbolic, w), f).u;
}

std::optional<DiniSolution> dini_solution(const LinearOperator& op, const DiniChainReport& report,
                                          std::uint64_t seed) {
  for (const auto& chain : report.chains) {
    if (!chain.factorable()) continue;
    DiniSolution sol;
    sol.ordering = chain.ordering;
    sol.link_step = chain.links.back().step;
    sol.v = factored_general_solution(*chain.links.back().factorization);

    // Walks a kernel element of the last link back to the original operator.
    auto pull_back = [&](Expr v) {
      for (auto it = chain.links.rbegin(); it != chain.links.rend(); ++it) v = back_substitute(*it->transform, v, it->frame).u;
      return v;
    };
    try {
      sol.u = pull_back(sol.v);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Unsupported) throw;
      sol.witness_log.push_back(std::string("symbolic reduction: ") + e.what());
    }
    if (sol.u) {
      const auto rep = verify_solution(op, *sol.u, seed);
      sol.status = rep.status;
      sol.witness_log.push_back("symbolic u: " + std::string(to_string(rep.status)));
      if (rep.status == VerificationStatus::Verified) return sol;
    }

    // Polynomial witnesses for phi and psi; theta stays symbolic.
    std::mt19937_64 rng(seed);
    std::vector<std::map<std::string, FunctionWitness>> witnesses;
    witnesses.push_back({{"phi", {{"_s1", "_s2"}, var("_s2")}}, {"psi", {{"_s1", "_s2"}, var("_s2")}}});
    for (int i = 0; i < 2; ++i)
      witnesses.push_back({{"phi", random_polynomial_witness(rng, 2, 2)}, {"psi", random_polynomial_witness(rng, 2, 2)}});
    bool all_ok = true;
    for (const auto& w : witnesses) {
      try {
        const Expr u = pull_back(instantiate_functions(sol.v, w));
        const auto rep = verify_solution(op, u, seed);
        sol.witness_log.push_back("phi = " + w.at("phi").body.str() + ", psi = " + w.at("psi").body.str() + ": u = " +
                                  u.str() + " -> " + to_string(rep.status));
        if (rep.status != VerificationStatus::Verified) all_ok = false;
      } catch (const Error& e) {
        sol.witness_log.push_back(std::string("witness failed: ") + e.what());
        all_ok = false;
      }
    }
    sol.status = all_ok ? VerificationStatus::VerifiedOnWitnesses : VerificationStatus::Failed;
    return sol;
  }
  return std::nullopt;
}

}  // namespace cascade
