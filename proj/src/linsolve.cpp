#include "cascade/linsolve.hpp"

#include <algorithm>
#include <functional>

#include "cascade/calculus.hpp"
#include "cascade/polyalg.hpp"

namespace cascade::linsolve {

std::vector<std::size_t> rref(Matrix& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    const Rational inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<Row> nullspace(Matrix m, std::size_t columns) {
  const auto pivots = rref(m);
  std::vector<bool> is_pivot(columns, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<Row> basis;
  for (std::size_t f = 0; f < columns; ++f) {
    if (is_pivot[f]) continue;
    Row v(columns, 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<Poly> coefficient_equations(const Expr& e, const std::set<std::string>& unknowns) {
  std::map<Monomial, Poly, MonomialGreater> groups;
  for (const auto& [m, c] : e.num().terms()) {
    Monomial known, unknown;
    for (const auto& [a, k] : m.factors()) {
      Monomial& target = a->kind == AtomKind::Variable && unknowns.count(a->name) ? unknown : known;
      target = target * Monomial::of(a, k);
    }
    groups[known].add_term(unknown, c);
  }
  std::vector<Poly> out;
  for (auto& [m, p] : groups)
    if (!p.is_zero()) out.push_back(std::move(p));
  return out;
}

LinearSystem linear_system(const std::vector<Poly>& equations, const std::vector<std::string>& unknowns) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < unknowns.size(); ++i) index[unknowns[i]] = i;
  LinearSystem sys;
  for (const auto& eq : equations) {
    Row row(unknowns.size(), 0);
    Rational rhs = 0;
    for (const auto& [m, c] : eq.terms()) {
      if (m.is_one()) {
        rhs -= c;
        continue;
      }
      if (m.total_degree() != 1) throw Error(ErrorKind::Consistency, "nonlinear equation in linear system");
      const Atom& a = m.factors()[0].first;
      auto it = index.find(a->name);
      if (a->kind != AtomKind::Variable || it == index.end())
        throw Error(ErrorKind::Consistency, "equation involves a non-unknown atom");
      row[it->second] += c;
    }
    sys.a.push_back(std::move(row));
    sys.b.push_back(rhs);
  }
  return sys;
}

std::optional<std::map<std::string, Rational>> solve_linear(const std::vector<Poly>& equations,
                                                            const std::vector<std::string>& unknowns) {
  const auto sys = linear_system(equations, unknowns);
  Matrix aug = sys.a;
  for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(sys.b[i]);
  const auto pivots = rref(aug);
  std::map<std::string, Rational> out;
  for (const auto& u : unknowns) out[u] = 0;
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    if (pivots[i] == unknowns.size()) return std::nullopt;
    out[unknowns[pivots[i]]] = aug[i].back();
  }
  return out;
}

std::vector<std::string> fresh_unknowns(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

namespace {

struct Binding {
  std::string name;
  Poly num, den;
};

class SystemSolver {
 public:
  SystemSolver(std::vector<std::string> unknowns, std::size_t max_solutions)
      : unknowns_(std::move(unknowns)), max_(max_solutions) {
    for (const auto& u : unknowns_) atoms_.push_back(make_variable_atom(u));
  }

  std::vector<std::map<std::string, Rational>> solutions;

  void run(std::vector<Poly> eqs, std::vector<Binding> bound, int depth) {
    if (solutions.size() >= max_ || depth > 64) return;
    if (!simplify(eqs)) return;
    if (eqs.empty()) {
      finish(bound);
      return;
    }
    // Linear unknown with constant coefficient: eliminate.
    {
      std::optional<std::pair<std::size_t, std::size_t>> best;
      for (std::size_t i = 0; i < eqs.size(); ++i)
        for (std::size_t k = 0; k < atoms_.size(); ++k) {
          if (eqs[i].degree(atoms_[k]) != 1) continue;
          const Poly c = eqs[i].coefficient_of_degree(atoms_[k], 1);
          if (!c.is_constant()) continue;
          if (!best || eqs[i].size() < eqs[best->first].size()) best = std::make_pair(i, k);
        }
      if (best) {
        const auto [i, k] = *best;
        const Poly c = eqs[i].coefficient_of_degree(atoms_[k], 1);
        const Poly rest = eqs[i].coefficient_of_degree(atoms_[k], 0);
        const Poly value = rest * Rational(-1 / c.constant_value());
        std::vector<Poly> next;
        for (std::size_t j = 0; j < eqs.size(); ++j)
          if (j != i) next.push_back(polyalg::substitute(eqs[j], atoms_[k], value));
        bound.push_back({unknowns_[k], value, Poly(1)});
        run(std::move(next), std::move(bound), depth + 1);
        return;
      }
    }
    // Univariate equation: branch on rational roots.
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      const auto as = eqs[i].atoms();
      if (as.size() != 1) continue;
      const Atom a = *as.begin();
      for (const auto& r : polyalg::rational_roots(eqs[i], a)) branch(eqs, bound, a, Poly(r), depth);
      return;
    }
    // Monomial content: u * q = 0 branches on u = 0 and q = 0.
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      for (const auto& a : atoms_) {
        bool divides = eqs[i].contains(a);
        for (const auto& [m, c] : eqs[i].terms())
          if (m.degree(a) == 0) divides = false;
        if (!divides) continue;
        branch(eqs, bound, a, Poly(0), depth);
        auto q = polyalg::exact_div(eqs[i], Poly::atom(a));
        auto next = eqs;
        next[i] = *q;
        run(std::move(next), bound, depth + 1);
        return;
      }
    }
    // Linear with nonconstant coefficient c: either c = 0 and the rest
    // vanishes, or u = -rest / c.
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      for (std::size_t k = 0; k < atoms_.size(); ++k) {
        if (eqs[i].degree(atoms_[k]) != 1) continue;
        const Poly c = eqs[i].coefficient_of_degree(atoms_[k], 1);
        const Poly rest = eqs[i].coefficient_of_degree(atoms_[k], 0);
        {
          auto next = eqs;
          next[i] = c;
          next.push_back(rest);
          run(std::move(next), bound, depth + 1);
        }
        std::vector<Poly> next;
        for (std::size_t j = 0; j < eqs.size(); ++j) {
          if (j == i) continue;
          const auto coeffs = eqs[j].coefficients_in(atoms_[k]);
          const int d = eqs[j].degree(atoms_[k]);
          Poly cleared;
          for (const auto& [e, p] : coeffs) cleared += p * (-rest).pow(e) * c.pow(d - e);
          next.push_back(cleared);
        }
        bound.push_back({unknowns_[k], -rest, c});
        run(std::move(next), std::move(bound), depth + 1);
        return;
      }
    }
  }

 private:
  std::vector<std::string> unknowns_;
  std::vector<Atom> atoms_;
  std::size_t max_;

  void branch(const std::vector<Poly>& eqs, std::vector<Binding> bound, const Atom& a, const Poly& value,
              int depth) {
    std::vector<Poly> next;
    for (const auto& e : eqs) next.push_back(polyalg::substitute(e, a, value));
    bound.push_back({a->name, value, Poly(1)});
    run(std::move(next), std::move(bound), depth + 1);
  }

  static bool simplify(std::vector<Poly>& eqs) {
    std::vector<Poly> out;
    for (auto& e : eqs) {
      if (e.is_zero()) continue;
      if (e.is_constant()) return false;
      Poly m = e.monic();
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(std::move(m));
    }
    eqs = std::move(out);
    return true;
  }

  void finish(const std::vector<Binding>& bound) {
    std::map<std::string, Rational> values;
    for (const auto& u : unknowns_) values[u] = 0;
    for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
      auto n = evaluate(Expr(it->num), values);
      auto d = evaluate(Expr(it->den), values);
      if (!n || !d || *d == 0) return;
      values[it->name] = *n / *d;
    }
    if (std::find(solutions.begin(), solutions.end(), values) == solutions.end()) solutions.push_back(values);
  }
};

}  // namespace

std::vector<std::map<std::string, Rational>> solve_polynomial_system(
    const std::vector<Poly>& equations, const std::vector<std::string>& unknowns, std::size_t max_solutions) {
  SystemSolver s(unknowns, max_solutions);
  s.run(equations, {}, 0);
  // Keep only genuine solutions of the original system.
  std::vector<std::map<std::string, Rational>> out;
  for (const auto& sol : s.solutions) {
    bool ok = true;
    for (const auto& e : equations) {
      auto v = evaluate(Expr(e), sol);
      if (!v || *v != 0) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(sol);
  }
  return out;
}

}  // namespace cascade::linsolve
