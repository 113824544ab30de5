#include "cascade/first_order.hpp"

#include <algorithm>
#include <random>

#include "cascade/linsolve.hpp"

namespace cascade {
namespace {

// Exponent vectors of total degree lo..hi, ascending degree.
std::vector<MultiIndex> monomials(std::size_t n, int lo, int hi) {
  std::vector<MultiIndex> out;
  for (int d = lo; d <= hi; ++d) {
    std::vector<MultiIndex> level{{}};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<MultiIndex> next;
      for (const auto& m : level) {
        int used = 0;
        for (int e : m) used += e;
        if (i + 1 == n) {
          auto c = m;
          c.push_back(d - used);
          next.push_back(std::move(c));
        } else {
          for (int e = d - used; e >= 0; --e) {
            auto c = m;
            c.push_back(e);
            next.push_back(std::move(c));
          }
        }
      }
      level = std::move(next);
    }
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

Expr monomial_expr(const Variables& vars, const MultiIndex& m) {
  Expr out(1);
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (m[i]) out *= var(vars[i]).pow(m[i]);
  return out;
}

// Greedy selection of functionally independent expressions by the rank of
// their gradients at a random rational point.
std::vector<Expr> independent_subset(const std::vector<Expr>& candidates, const Variables& vars,
                                     std::size_t want) {
  std::mt19937_64 rng(977);
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::map<std::string, Rational> point;
    for (const auto& v : vars) point[v] = random_rational(rng, 7);
    linsolve::Matrix rows;
    std::vector<Expr> chosen;
    bool failed = false;
    for (const auto& c : candidates) {
      linsolve::Row g;
      for (const auto& v : vars) {
        auto val = evaluate(diff(c, v), point);
        if (!val) {
          failed = true;
          break;
        }
        g.push_back(*val);
      }
      if (failed) break;
      auto trial = rows;
      trial.push_back(g);
      if (linsolve::rref(trial).size() == rows.size() + 1) {
        rows.push_back(g);
        chosen.push_back(c);
        if (chosen.size() == want) break;
      }
    }
    if (!failed) return chosen;
  }
  return {};
}

struct Straightening {
  std::size_t k = 0;
  std::map<std::string, Expr> flow;  // moving x_j -> c_j + G_j(x_k, c, constants)
  std::map<std::string, Expr> back;  // c_j -> raw invariant in the original variables
  std::vector<Expr> invariants;      // raw, one per variable other than x_k
  bool trivial = true;
};

std::string flow_constant(const std::string& v) { return "_c_" + v; }

std::optional<Straightening> straighten_along(const FirstOrderOperator& w, std::size_t k) {
  const auto& vars = w.vars();
  Straightening s;
  s.k = k;
  std::set<std::string> allowed{vars[k]};
  std::vector<std::size_t> pending;
  std::map<std::size_t, Expr> inv;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (j == k) continue;
    if (w.coefficient(j).is_zero()) {
      allowed.insert(vars[j]);
      inv[j] = var(vars[j]);
    } else {
      pending.push_back(j);
      s.trivial = false;
    }
  }
  while (!pending.empty()) {
    bool progress = false;
    for (auto it = pending.begin(); it != pending.end();) {
      const std::size_t j = *it;
      const Expr ratio = substitute(w.coefficient(j) / w.coefficient(k), s.flow);
      bool ok = true;
      for (const auto& v : variables_of(ratio))
        if (!allowed.count(v) && v.rfind("_c_", 0) != 0) ok = false;
      if (!ok) {
        ++it;
        continue;
      }
      const Expr g = integrate_heuristic(ratio, vars[k]);
      if (!is_closed_form(g)) return std::nullopt;
      const std::string c = flow_constant(vars[j]);
      inv[j] = var(vars[j]) - substitute(g, s.back);
      s.flow[vars[j]] = var(c) + g;
      s.back[c] = inv[j];
      it = pending.erase(it);
      progress = true;
    }
    if (!progress) return std::nullopt;
  }
  for (auto& [j, e] : inv) s.invariants.push_back(e);
  return s;
}

std::optional<Straightening> straighten(const FirstOrderOperator& w) {
  // Prefer a flow variable with constant coefficient.
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < w.vars().size(); ++k)
    if (!w.coefficient(k).is_zero() && w.coefficient(k).is_constant()) order.push_back(k);
  for (std::size_t k = 0; k < w.vars().size(); ++k)
    if (!w.coefficient(k).is_zero() && !w.coefficient(k).is_constant()) order.push_back(k);
  for (auto k : order)
    if (auto s = straighten_along(w, k)) return s;
  return std::nullopt;
}

std::string reduced_system_text(const FirstOrderOperator& w, const Expr& rhs) {
  std::string out;
  for (std::size_t i = 0; i < w.vars().size(); ++i)
    out += "d" + w.vars()[i] + "/ds = " + w.coefficient(i).str() + ", ";
  Expr du = rhs - w.zeroth() * var("u");
  return out + "du/ds = " + du.str();
}

std::vector<Expr> rational_invariants(const FirstOrderOperator& w, int degree_bound) {
  const auto& vars = w.vars();
  const FirstOrderOperator field = w.pure();
  std::vector<Expr> out;
  const auto pmons = monomials(vars.size(), 1, degree_bound);
  for (const auto& qm : monomials(vars.size(), 1, degree_bound)) {
    const Expr q = monomial_expr(vars, qm);
    const Expr wq = field.apply(q);
    const auto unknowns = linsolve::fresh_unknowns("_p", pmons.size());
    Expr eq(0);
    for (std::size_t i = 0; i < pmons.size(); ++i) {
      const Expr m = monomial_expr(vars, pmons[i]);
      eq += var(unknowns[i]) * (q * field.apply(m) - m * wq);
    }
    const auto eqs = linsolve::coefficient_equations(eq, {unknowns.begin(), unknowns.end()});
    const auto sys = linsolve::linear_system(eqs, unknowns);
    for (const auto& v : linsolve::nullspace(sys.a, pmons.size())) {
      Expr p(0);
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) p += Expr(v[i]) * monomial_expr(vars, pmons[i]);
      const Expr r = p / q;
      if (!r.is_constant()) out.push_back(r);
    }
  }
  return out;
}

}  // namespace

Expr normalize_invariant(const Expr& e) {
  Poly num = e.num();
  if (num.is_zero()) return e;
  if (e.den().is_constant()) {
    for (const auto& [m, c] : num.terms())
      if (m.is_one()) {
        num -= Poly(c);
        break;
      }
  }
  if (num.is_zero()) return e;
  return Expr::fraction(num, e.den()) / Expr(num.leading_coefficient());
}

std::vector<Expr> polynomial_invariants(const FirstOrderOperator& w, int degree_bound) {
  const auto& vars = w.vars();
  const FirstOrderOperator field = w.pure();
  const auto mons = monomials(vars.size(), 1, degree_bound);
  const auto unknowns = linsolve::fresh_unknowns("_a", mons.size());
  Expr eq(0);
  for (std::size_t i = 0; i < mons.size(); ++i)
    eq += var(unknowns[i]) * field.apply(monomial_expr(vars, mons[i]));
  const auto eqs = linsolve::coefficient_equations(eq, {unknowns.begin(), unknowns.end()});
  const auto sys = linsolve::linear_system(eqs, unknowns);
  std::vector<Expr> out;
  for (const auto& v : linsolve::nullspace(sys.a, mons.size())) {
    Expr p(0);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) p += Expr(v[i]) * monomial_expr(vars, mons[i]);
    out.push_back(normalize_invariant(p));
  }
  return out;
}

FirstOrderSolution solve_first_order_heuristic(const FirstOrderOperator& w, const Expr& rhs,
                                               const FirstOrderOptions& opts) {
  FirstOrderSolution sol;
  sol.reduced_system = reduced_system_text(w, rhs);
  if (w.has_zero_field()) return sol;
  const auto& vars = w.vars();
  const std::size_t n = vars.size();

  if (auto s = straighten(w)) {
    try {
      const std::string& xk = vars[s->k];
      const Expr bk = w.coefficient(s->k);
      const Expr b0_flow = substitute(w.zeroth() / bk, s->flow);
      const Expr log_e = -integrate_heuristic(b0_flow, xk);
      if (s->trivial || is_closed_form(log_e)) {
        const Expr e_flow = exp(log_e);
        const Expr r_flow = substitute(rhs / bk, s->flow) / e_flow;
        const Expr g = integrate_heuristic(r_flow, xk);
        if (s->trivial || is_closed_form(g)) {
          const Expr e = substitute(e_flow, s->back);
          sol.integrating_factor = e;
          sol.particular = e * substitute(g, s->back);
          for (const auto& i : s->invariants) sol.invariants.push_back(normalize_invariant(i));
          sol.general = sol.particular + e * func(opts.function_name, sol.invariants);
          sol.supported = true;
        }
      }
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::Unsupported) throw;
      sol = FirstOrderSolution{};
      sol.reduced_system = reduced_system_text(w, rhs);
    }
    if (sol.supported) {
      const ZeroTest t = is_zero(w.apply(sol.general) - rhs);
      if (t.status == ZeroStatus::NonZero) {
        sol.supported = false;
      } else {
        return sol;
      }
    }
  }

  // Invariant ansatz.
  auto candidates = polynomial_invariants(w, opts.degree_bound);
  if (opts.rational_invariants) {
    auto r = rational_invariants(w, opts.degree_bound);
    candidates.insert(candidates.end(), r.begin(), r.end());
  }
  auto chosen = independent_subset(candidates, vars, n - 1);
  if (chosen.size() != n - 1) return sol;
  sol.invariants = chosen;
  if (!w.zeroth().is_zero() || !rhs.is_zero()) return sol;
  sol.integrating_factor = Expr(1);
  sol.particular = Expr(0);
  sol.general = func(opts.function_name, chosen);
  sol.supported = true;
  return sol;
}

}  // namespace cascade
