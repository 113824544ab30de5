#include "cascade/calculus.hpp"

#include "cascade/polyalg.hpp"

namespace cascade {

const char* to_string(ZeroStatus s) {
  switch (s) {
    case ZeroStatus::Zero: return "zero";
    case ZeroStatus::NonZero: return "nonzero";
    case ZeroStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expr atom_derivative(const Atom& a, const std::string& v) {
  switch (a->kind) {
    case AtomKind::Variable:
      return Expr(a->name == v ? 1 : 0);
    case AtomKind::Function: {
      Expr out(0);
      for (std::size_t i = 0; i < a->args.size(); ++i) {
        Expr da = diff(a->args[i], v);
        if (da.is_zero()) continue;
        std::vector<int> d = a->derivative;
        ++d[i];
        out += func_derivative(a->name, std::move(d), a->args) * da;
      }
      return out;
    }
    case AtomKind::Exp:
      return Expr::from_atom(a) * diff(a->args[0], v);
    case AtomKind::Log:
      return diff(a->args[0], v) / a->args[0];
    case AtomKind::Integral:
      if (a->name == v) return a->args[0];
      if (!depends_on(a->args[0], v)) return Expr(0);
      return integral_node(diff(a->args[0], v), a->name);
  }
  return Expr(0);
}

Expr poly_derivative(const Poly& p, const std::string& v) {
  Expr out(0);
  for (const auto& a : p.atoms()) {
    if (!a->depends.count(v)) continue;
    Expr da = atom_derivative(a, v);
    if (da.is_zero()) continue;
    out += Expr(p.formal_derivative(a)) * da;
  }
  return out;
}

}  // namespace

Expr diff(const Expr& e, const std::string& v) {
  if (!depends_on(e, v)) return Expr(0);
  const Expr dn = poly_derivative(e.num(), v);
  if (e.den().is_constant()) return dn;
  const Expr dd = poly_derivative(e.den(), v);
  // dn = A/B, dd = C/E (B, E come from logarithm atoms). With g = gcd(D, C)
  // and Bl = lcm(B, E) the quotient rule result
  //   (A Bl/B D/g - N C/g Bl/E) / (Bl D D/g)
  // is coprime in the generic case, which keeps the final gcd cheap.
  const Poly& D = e.den();
  const Poly g = polyalg::gcd(D, dd.num());
  const Poly Dg = *polyalg::exact_div(D, g);
  const Poly Cg = *polyalg::exact_div(dd.num(), g);
  const Poly h = polyalg::gcd(dn.den(), dd.den());
  const Poly Bl = *polyalg::exact_div(dn.den() * dd.den(), h);
  const Poly num = dn.num() * *polyalg::exact_div(Bl, dn.den()) * Dg -
                   e.num() * Cg * *polyalg::exact_div(Bl, dd.den());
  return Expr::fraction(num, Bl * D * Dg);
}

Expr diff(const Expr& e, const std::string& v, int times) {
  Expr out = e;
  for (int i = 0; i < times && !out.is_zero(); ++i) out = diff(out, v);
  return out;
}

// ---------------------------------------------------------------------------
// Antiderivatives

namespace {

using Univariate = std::map<int, Expr>;

Univariate to_univariate(const Poly& p, const Atom& v) {
  Univariate out;
  for (const auto& [d, c] : p.coefficients_in(v)) out[d] = Expr(c);
  return out;
}

int degree_of(const Univariate& u) { return u.empty() ? -1 : u.rbegin()->first; }

Expr eval_univariate(const Univariate& u, const Expr& at) {
  Expr acc(0);
  if (u.empty()) return acc;
  for (int d = degree_of(u); d >= 0; --d) {
    acc = acc * at;
    auto it = u.find(d);
    if (it != u.end()) acc += it->second;
  }
  return acc;
}

Univariate derivative_of(const Univariate& u) {
  Univariate out;
  for (const auto& [d, c] : u)
    if (d > 0) out[d - 1] = c * Expr(d);
  return out;
}

void divide(const Univariate& n, const Univariate& d, Univariate& q, Univariate& r) {
  r = n;
  q.clear();
  const int dd = degree_of(d);
  const Expr lc = d.at(dd);
  while (!r.empty() && degree_of(r) >= dd) {
    const int dr = degree_of(r);
    const Expr t = r.at(dr) / lc;
    q[dr - dd] = t;
    for (const auto& [k, c] : d) {
      Expr& slot = r[k + dr - dd];
      slot = slot - t * c;
    }
    for (auto it = r.begin(); it != r.end();) {
      if (it->second.is_zero())
        it = r.erase(it);
      else
        ++it;
    }
  }
}

Expr power_rule(const Univariate& p, const Expr& v) {
  Expr out(0);
  for (const auto& [k, c] : p) out += c * v.pow(k + 1) / Expr(k + 1);
  return out;
}

bool only_variable_depends(const Expr& e, const std::string& v) {
  for (const auto& a : e.atoms()) {
    if (!a->depends.count(v)) continue;
    if (a->kind != AtomKind::Variable) return false;
  }
  return true;
}

// Rational function of v with coefficients free of v.
Expr integrate_rational(const Expr& e, const std::string& vname) {
  const Atom v = make_variable_atom(vname);
  const Expr vx = Expr::from_atom(v);
  const Univariate n = to_univariate(e.num(), v);
  const Univariate d = to_univariate(e.den(), v);
  Univariate q, r;
  divide(n, d, q, r);
  Expr out = power_rule(q, vx);
  if (r.empty()) return out;

  const Expr rest = eval_univariate(r, vx) / eval_univariate(d, vx);
  const Poly g = polyalg::gcd(e.den(), e.den().formal_derivative(v));
  const int deg = degree_of(d);
  if (g.degree(v) > 0 || deg > 2) return out + integral_node(rest, vname);

  auto c = [&](int k) {
    auto it = d.find(k);
    return it == d.end() ? Expr(0) : it->second;
  };
  std::vector<Expr> roots;
  if (deg == 1) {
    roots.push_back(-c(0) / c(1));
  } else {
    const Expr disc = c(1) * c(1) - Expr(4) * c(2) * c(0);
    auto s = polyalg::sqrt_exact(disc);
    if (!s) return out + integral_node(rest, vname);
    const Expr two_a = Expr(2) * c(2);
    roots.push_back((-c(1) + *s) / two_a);
    roots.push_back((-c(1) - *s) / two_a);
  }
  const Univariate dprime = derivative_of(d);
  for (const Expr& rho : roots) {
    const Expr residue = eval_univariate(r, rho) / eval_univariate(dprime, rho);
    const Poly lin = (rho.den() * Poly::atom(v) - rho.num()).monic();
    out += residue * ln(Expr(lin));
  }
  return out;
}

}  // namespace

Expr integrate_heuristic(const Expr& e, const std::string& vname) {
  if (e.is_zero()) return Expr(0);
  const Expr vx = var(vname);
  if (!depends_on(e, vname)) return e * vx;

  if (depends_on(Expr(e.den()), vname)) {
    if (only_variable_depends(e, vname)) return integrate_rational(e, vname);
    return integral_node(e, vname);
  }

  const Atom v = make_variable_atom(vname);
  Univariate poly_part;
  std::map<Atom, std::pair<Expr, Univariate>, AtomLess> exp_groups;  // atom -> (q, p(v))
  Poly leftover;
  for (const auto& [m, c] : e.num().terms()) {
    int k = 0;
    Monomial coeff;
    std::vector<std::pair<Atom, int>> dependent;
    for (const auto& f : m.factors()) {
      if (f.first == v)
        k = f.second;
      else if (f.first->depends.count(vname))
        dependent.push_back(f);
      else
        coeff = coeff * Monomial::of(f.first, f.second);
    }
    const Expr cexpr(Poly::term(coeff, c));
    if (dependent.empty()) {
      poly_part[k] += cexpr;
      continue;
    }
    if (dependent.size() == 1 && dependent[0].second == 1 &&
        dependent[0].first->kind == AtomKind::Exp) {
      const Atom& ea = dependent[0].first;
      const Expr q = diff(ea->args[0], vname);
      if (!q.is_zero() && !depends_on(q, vname)) {
        auto& slot = exp_groups[ea];
        slot.first = q;
        slot.second[k] += cexpr;
        continue;
      }
    }
    leftover.add_term(m, c);
  }

  const Expr den(e.den());
  Expr out = power_rule(poly_part, vx);
  for (const auto& [ea, qp] : exp_groups) {
    const Expr& q = qp.first;
    Expr p = eval_univariate(qp.second, vx);
    Expr sum(0);
    Expr qpow = q;
    int sign = 1;
    while (!p.is_zero()) {
      sum += Expr(sign) * p / qpow;
      p = diff(p, vname);
      qpow = qpow * q;
      sign = -sign;
    }
    out += Expr::from_atom(ea) * sum;
  }
  out = out / den;
  if (!leftover.is_zero()) out += integral_node(Expr(leftover) / den, vname);
  return out;
}

bool is_closed_form(const Expr& e) { return !contains_kind(e, AtomKind::Integral); }

// ---------------------------------------------------------------------------
// Substitution

namespace {

Expr eval_poly(const Poly& p, const std::map<Atom, Expr, AtomLess>& repl) {
  bool polynomial = true;
  for (const auto& [a, x] : repl)
    if (!x.is_polynomial()) polynomial = false;
  if (polynomial) {
    Poly out;
    std::map<std::pair<Atom, int>, Poly> powers;
    for (const auto& [m, c] : p.terms()) {
      Poly t(c);
      for (const auto& [a, e] : m.factors()) {
        auto it = repl.find(a);
        if (it == repl.end()) {
          t = t * Poly::atom(a, e);
        } else {
          auto key = std::make_pair(a, e);
          auto pit = powers.find(key);
          if (pit == powers.end())
            pit = powers.emplace(key, it->second.num().pow(e)).first;
          t = t * pit->second;
        }
      }
      out += t;
    }
    return Expr(out);
  }
  Expr out(0);
  for (const auto& [m, c] : p.terms()) {
    Expr t(c);
    Monomial kept;
    for (const auto& [a, e] : m.factors()) {
      auto it = repl.find(a);
      if (it == repl.end())
        kept = kept * Monomial::of(a, e);
      else
        t = t * it->second.pow(e);
    }
    out += t * Expr(Poly::term(kept, Rational(1)));
  }
  return out;
}

}  // namespace

Expr map_atoms(const Expr& e, const std::function<std::optional<Expr>(const Atom&)>& fn) {
  std::map<Atom, Expr, AtomLess> repl;
  for (const auto& a : e.atoms()) {
    if (auto r = fn(a)) {
      repl.emplace(a, *r);
      continue;
    }
    if (a->args.empty()) continue;
    std::vector<Expr> args;
    bool changed = false;
    for (const auto& arg : a->args) {
      args.push_back(map_atoms(arg, fn));
      if (args.back() != arg) changed = true;
    }
    if (!changed) continue;
    switch (a->kind) {
      case AtomKind::Function:
        repl.emplace(a, func_derivative(a->name, a->derivative, std::move(args)));
        break;
      case AtomKind::Exp:
        repl.emplace(a, exp(args[0]));
        break;
      case AtomKind::Log:
        repl.emplace(a, ln(args[0]));
        break;
      case AtomKind::Integral:
        repl.emplace(a, integrate_heuristic(args[0], a->name));
        break;
      case AtomKind::Variable:
        break;
    }
  }
  if (repl.empty()) return e;
  return eval_poly(e.num(), repl) / eval_poly(e.den(), repl);
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& values) {
  if (values.empty()) return e;
  std::function<std::optional<Expr>(const Atom&)> fn = [&](const Atom& a) -> std::optional<Expr> {
    if (a->kind == AtomKind::Variable) {
      auto it = values.find(a->name);
      if (it != values.end()) return it->second;
      return std::nullopt;
    }
    bool touches = false;
    for (const auto& [name, val] : values)
      if (a->depends.count(name)) touches = true;
    if (!touches) return std::nullopt;
    if (a->kind == AtomKind::Integral && values.count(a->name)) {
      // Substituting the integration variable needs a closed antiderivative.
      std::map<std::string, Expr> inner = values;
      inner.erase(a->name);
      const Expr integrand = substitute(a->args[0], inner);
      const Expr anti = integrate_heuristic(integrand, a->name);
      if (!is_closed_form(anti))
        throw Error(ErrorKind::Unsupported,
                    "cannot substitute the integration variable of an unevaluated antiderivative");
      return substitute(anti, a->name, values.at(a->name));
    }
    return std::nullopt;
  };
  return map_atoms(e, fn);
}

Expr substitute(const Expr& e, const std::string& v, const Expr& value) {
  return substitute(e, std::map<std::string, Expr>{{v, value}});
}

Expr instantiate_functions(const Expr& e, const std::map<std::string, FunctionWitness>& witnesses) {
  std::function<std::optional<Expr>(const Atom&)> fn;
  fn = [&](const Atom& a) -> std::optional<Expr> {
    if (a->kind != AtomKind::Function) return std::nullopt;
    auto it = witnesses.find(a->name);
    if (it == witnesses.end()) return std::nullopt;
    const FunctionWitness& w = it->second;
    if (w.slots.size() != a->args.size())
      throw Error(ErrorKind::Consistency, "witness arity mismatch for " + a->name);
    Expr body = w.body;
    for (std::size_t i = 0; i < w.slots.size(); ++i) body = diff(body, w.slots[i], a->derivative[i]);
    std::map<std::string, Expr> vals;
    for (std::size_t i = 0; i < w.slots.size(); ++i) vals[w.slots[i]] = map_atoms(a->args[i], fn);
    return substitute(body, vals);
  };
  return map_atoms(e, fn);
}

// ---------------------------------------------------------------------------
// Evaluation and zero testing

namespace {

std::optional<Rational> eval_poly_at(const Poly& p, const std::map<std::string, Rational>& point) {
  Rational acc = 0;
  for (const auto& [m, c] : p.terms()) {
    Rational t = c;
    for (const auto& [a, e] : m.factors()) {
      if (a->kind != AtomKind::Variable) return std::nullopt;
      auto it = point.find(a->name);
      if (it == point.end()) return std::nullopt;
      Rational pw = 1;
      for (int i = 0; i < e; ++i) pw *= it->second;
      t *= pw;
    }
    acc += t;
  }
  return acc;
}

bool only_variables(const Poly& p) {
  for (const auto& a : p.atoms())
    if (a->kind != AtomKind::Variable) return false;
  return true;
}

}  // namespace

std::optional<Rational> evaluate(const Expr& e, const std::map<std::string, Rational>& point) {
  auto d = eval_poly_at(e.den(), point);
  if (!d || *d == 0) return std::nullopt;
  auto n = eval_poly_at(e.num(), point);
  if (!n) return std::nullopt;
  return *n / *d;
}

Rational random_rational(std::mt19937_64& rng, int range) {
  std::uniform_int_distribution<int> num(-range, range);
  std::uniform_int_distribution<int> den(1, range);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

ZeroTest sample_zero(const Expr& e, const std::vector<std::string>& vars, const SamplingOptions& opts) {
  ZeroTest out;
  if (!only_variables(e.num()) || !only_variables(e.den())) return out;
  std::mt19937_64 rng(opts.seed);
  int good = 0;
  for (int attempt = 0; attempt < opts.points * 20 && good < opts.points; ++attempt) {
    std::map<std::string, Rational> point;
    for (const auto& v : vars) point[v] = random_rational(rng, 7 + attempt);
    auto val = evaluate(e, point);
    if (!val) continue;
    ++good;
    if (*val != 0) {
      out.status = ZeroStatus::NonZero;
      out.witness = point;
      return out;
    }
  }
  out.status = good > 0 ? ZeroStatus::Zero : ZeroStatus::Inconclusive;
  return out;
}

ZeroTest is_zero(const Expr& e, const SamplingOptions& opts) {
  ZeroTest out;
  if (e.num().is_zero()) {
    out.status = ZeroStatus::Zero;
    return out;
  }
  bool basis_only = true;
  for (const auto& a : e.num().atoms())
    if (a->kind != AtomKind::Variable && a->kind != AtomKind::Function) basis_only = false;
  if (basis_only) {
    out.status = ZeroStatus::NonZero;
    if (only_variables(e.num()) && only_variables(e.den())) {
      std::vector<std::string> vars;
      for (const auto& a : e.atoms()) vars.push_back(a->name);
      auto s = sample_zero(e, vars, opts);
      if (s.status == ZeroStatus::NonZero) out.witness = s.witness;
    }
    return out;
  }
  // Transcendental atoms that did not cancel: exact sampling is impossible.
  out.status = ZeroStatus::Inconclusive;
  return out;
}

FunctionWitness random_polynomial_witness(std::mt19937_64& rng, std::size_t arity, int degree) {
  FunctionWitness w;
  for (std::size_t i = 0; i < arity; ++i) w.slots.push_back("_s" + std::to_string(i + 1));
  // Enumerate exponent vectors of total degree <= degree.
  std::vector<std::vector<int>> exps{{}};
  for (std::size_t i = 0; i < arity; ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& ev : exps) {
      int used = 0;
      for (int x : ev) used += x;
      for (int k = 0; k + used <= degree; ++k) {
        auto n = ev;
        n.push_back(k);
        next.push_back(std::move(n));
      }
    }
    exps = std::move(next);
  }
  Poly body;
  for (const auto& ev : exps) {
    Monomial m;
    for (std::size_t i = 0; i < arity; ++i)
      m = m * Monomial::of(make_variable_atom(w.slots[i]), ev[i]);
    body.add_term(m, random_rational(rng, 5));
  }
  w.body = Expr(body);
  return w;
}

Expr linear_coefficient(const Expr& e, const Atom& a) {
  return Expr(e.num().formal_derivative(a)) / Expr(e.den());
}

std::set<std::string> variables_of(const Expr& e) {
  std::set<std::string> out;
  for (const auto& a : e.atoms()) out.insert(a->depends.begin(), a->depends.end());
  return out;
}

}  // namespace cascade
