#include "cascade/polyalg.hpp"

#include <algorithm>

namespace cascade::polyalg {
namespace {

Atom first_atom(const Poly& a, const Poly& b) {
  auto sa = a.atoms();
  auto sb = b.atoms();
  sa.insert(sb.begin(), sb.end());
  return *sa.begin();
}

// Picks the atom of b with the smallest degree (cheapest main variable).
Atom division_atom(const Poly& b) {
  Atom best;
  int best_deg = 0;
  for (const auto& a : b.atoms()) {
    const int d = b.degree(a);
    if (!best || d < best_deg) {
      best = a;
      best_deg = d;
    }
  }
  return best;
}

// Coefficients of p as a polynomial in the given atoms.
std::vector<Poly> coefficients_in_atoms(const Poly& p, const std::set<Atom, AtomLess>& atoms) {
  std::map<Monomial, Poly, MonomialGreater> groups;
  for (const auto& [m, c] : p.terms()) {
    Monomial outer, inner;
    for (const auto& [a, k] : m.factors()) {
      Monomial& target = atoms.count(a) ? outer : inner;
      target = target * Monomial::of(a, k);
    }
    groups[outer].add_term(inner, c);
  }
  std::vector<Poly> out;
  for (auto& [m, q] : groups) out.push_back(std::move(q));
  // Smallest first so the running gcd shrinks early.
  std::sort(out.begin(), out.end(), [](const Poly& x, const Poly& y) { return x.size() < y.size(); });
  return out;
}

using Dense = std::vector<Rational>;  // coefficient of v^i at index i

void trim(Dense& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// p with every atom except v replaced by its value.
Dense specialize(const Poly& p, const Atom& v, const std::map<Atom, Rational, AtomLess>& point) {
  Dense out(p.degree(v) + 1, Rational(0));
  for (const auto& [m, c] : p.terms()) {
    Rational t = c;
    int k = 0;
    for (const auto& [a, e] : m.factors()) {
      if (a == v) {
        k = e;
        continue;
      }
      Rational base = point.at(a), pw = 1;
      for (int i = 0; i < e; ++i) pw *= base;
      t *= pw;
    }
    out[k] += t;
  }
  trim(out);
  return out;
}

std::size_t dense_gcd_degree(Dense a, Dense b) {
  while (!b.empty()) {
    while (a.size() >= b.size()) {
      const Rational f = a.back() / b.back();
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
      trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return a.empty() ? 0 : a.size() - 1;
}

// True when a and b are proven coprime: for each atom v, a specialization of
// the other atoms that keeps both degrees in v leaves a gcd of degree 0 in v.
// The leading coefficient in v of any common factor divides those of a and b,
// so its degree in v survives the specialization.
bool coprime_by_specialization(const Poly& a, const Poly& b, const std::set<Atom, AtomLess>& atoms) {
  static const int kValues[] = {3, -5, 7, 11, -13, 17, 19, -23, 29, 31, -37, 41};
  for (const auto& v : atoms) {
    bool decided = false;
    for (int attempt = 0; attempt < 3 && !decided; ++attempt) {
      std::map<Atom, Rational, AtomLess> point;
      int i = attempt * 5;
      for (const auto& w : atoms)
        if (w != v) point[w] = Rational(kValues[i++ % 12], 1 + attempt);
      const Dense sa = specialize(a, v, point);
      const Dense sb = specialize(b, v, point);
      if (static_cast<int>(sa.size()) != a.degree(v) + 1 || static_cast<int>(sb.size()) != b.degree(v) + 1) continue;
      if (dense_gcd_degree(sa, sb) > 0) return false;
      decided = true;
    }
    if (!decided) return false;
  }
  return true;
}

// Heuristic gcd over Z: evaluate the last atom at a large integer xi, recurse,
// rebuild the candidate from its symmetric xi-adic digits and accept it when
// it divides both inputs. Inputs have integer coefficients.
mpz_class max_norm(const Poly& p) {
  mpz_class m = 0;
  for (const auto& [mono, c] : p.terms()) {
    mpz_class a = abs(c.get_num());
    if (a > m) m = a;
  }
  return m;
}

mpz_class integer_content(const Poly& p) {
  mpz_class g = 0;
  for (const auto& [m, c] : p.terms()) g = gcd(g, mpz_class(c.get_num()));
  return g;
}

Poly integer_primitive(const Poly& p) {
  const mpz_class g = integer_content(p);
  if (g == 0 || g == 1) return p;
  return p * Rational(mpz_class(1), g);
}

Poly integral_multiple(const Poly& p) {
  mpz_class l = 1;
  for (const auto& [m, c] : p.terms()) l = lcm(l, mpz_class(c.get_den()));
  return integer_primitive(p * Rational(l));
}

std::optional<Poly> heuristic_gcd(const Poly& a, const Poly& b, const std::vector<Atom>& atoms, std::size_t n,
                                  int& budget) {
  if (n == 0) {
    mpz_class g = gcd(mpz_class(a.constant_value().get_num()), mpz_class(b.constant_value().get_num()));
    return Poly(Rational(g));
  }
  // gcd = gcd(cont a, cont b) * gcd(pp a, pp b)
  const mpz_class content = gcd(integer_content(a), integer_content(b));
  const Poly pa = integer_primitive(a), pb = integer_primitive(b);
  const Atom& v = atoms[n - 1];
  mpz_class xi = 2 * std::min(max_norm(pa), max_norm(pb)) + 29;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const int deg = std::max(pa.degree(v), pb.degree(v));
    if (--budget < 0 || mpz_sizeinbase(xi.get_mpz_t(), 2) * (deg + 1) > 40000) return std::nullopt;
    const Poly av = substitute(pa, v, Poly(Rational(xi)));
    const Poly bv = substitute(pb, v, Poly(Rational(xi)));
    if (!av.is_zero() && !bv.is_zero()) {
      if (auto gamma = heuristic_gcd(av, bv, atoms, n - 1, budget)) {
        Poly rest = *gamma, g;
        const mpz_class half = xi / 2;
        for (int i = 0; !rest.is_zero(); ++i) {
          Poly digit;
          for (const auto& [m, c] : rest.terms()) {
            mpz_class r = c.get_num() % xi;  // c is integral
            if (r > half) r -= xi;
            if (r < -half) r += xi;
            if (r != 0) digit.add_term(m, Rational(r));
          }
          if (!digit.is_zero()) g += digit * Poly::atom(v, i);
          rest = (rest - digit) * Rational(mpz_class(1), xi);
        }
        if (!g.is_zero()) {
          g = integer_primitive(g);
          if (exact_div(pa, g) && exact_div(pb, g)) return g * Rational(content);
        }
      }
    }
    xi = xi * 73794 / 27011;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Poly> exact_div(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw Error(ErrorKind::Degenerate, "polynomial division by zero");
  if (a.is_zero()) return Poly();
  if (b.is_constant()) return a * (Rational(1) / b.constant_value());
  if (a.is_constant()) return std::nullopt;

  const Atom v = division_atom(b);
  const int n = b.degree(v);
  const Poly lcb = b.coefficient_of_degree(v, n);
  Poly r = a;
  Poly q;
  while (!r.is_zero()) {
    const int dr = r.degree(v);
    if (dr < n) return std::nullopt;
    const Poly lcr = r.coefficient_of_degree(v, dr);
    auto t = exact_div(lcr, lcb);
    if (!t) return std::nullopt;
    const Poly term = *t * Poly::atom(v, dr - n);
    q += term;
    r -= term * b;
  }
  return q;
}

Poly content(const Poly& p, const Atom& a) {
  Poly g;
  for (const auto& [d, c] : p.coefficients_in(a)) {
    g = gcd(g, c);
    if (g.is_constant() && !g.is_zero()) return Poly(1);
  }
  return g;
}

Poly primitive_part(const Poly& p, const Atom& a) {
  if (p.is_zero()) return p;
  const Poly c = content(p, a);
  auto q = exact_div(p, c);
  return *q;
}

Poly prem(const Poly& a, const Poly& b, const Atom& v) {
  const int n = b.degree(v);
  const Poly lcb = b.coefficient_of_degree(v, n);
  Poly r = a;
  while (!r.is_zero()) {
    const int dr = r.degree(v);
    if (dr < n) break;
    const Poly lcr = r.coefficient_of_degree(v, dr);
    r = lcb * r - lcr * Poly::atom(v, dr - n) * b;
  }
  return r;
}

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Poly(1);
  if (a == b) return a.monic();

  // Atoms occurring in only one argument: the gcd divides each coefficient
  // with respect to them.
  {
    const auto sa = a.atoms();
    const auto sb = b.atoms();
    std::set<Atom, AtomLess> only_a, only_b;
    for (const auto& x : sa)
      if (!sb.count(x)) only_a.insert(x);
    for (const auto& x : sb)
      if (!sa.count(x)) only_b.insert(x);
    if (!only_a.empty() || !only_b.empty()) {
      const bool split_a = !only_a.empty();
      Poly g = split_a ? b : a;
      for (const auto& c : coefficients_in_atoms(split_a ? a : b, split_a ? only_a : only_b)) {
        g = gcd(c, g);
        if (g.is_constant()) return Poly(1);
      }
      return g.monic();
    }
  }

  if (coprime_by_specialization(a, b, a.atoms())) return Poly(1);

  // Cheap path: a divides b or vice versa.
  if (a.size() <= b.size()) {
    if (exact_div(b, a)) return a.monic();
  } else if (exact_div(a, b)) {
    return b.monic();
  }

  {
    const auto set = a.atoms();
    const std::vector<Atom> atoms(set.begin(), set.end());
    int budget = 64;
    if (auto g = heuristic_gcd(integral_multiple(a), integral_multiple(b), atoms, atoms.size(), budget))
      return g->monic();
  }

  // Primitive pseudo-remainder sequence.

  const Atom v = first_atom(a, b);
  const Poly ca = content(a, v);
  const Poly cb = content(b, v);
  const Poly g0 = gcd(ca, cb);
  Poly pa = *exact_div(a, ca);
  Poly pb = *exact_div(b, cb);
  if (pa.degree(v) < pb.degree(v)) std::swap(pa, pb);
  while (!pb.is_zero()) {
    if (pb.degree(v) == 0) {
      pa = Poly(1);
      break;
    }
    const Poly r = prem(pa, pb, v);
    pa = std::move(pb);
    pb = r.is_zero() ? r : primitive_part(r, v).monic();
  }
  Poly g = pa.degree(v) > 0 ? primitive_part(pa, v) : Poly(1);
  return (g0 * g).monic();
}

SquareFree square_free(const Poly& p) {
  SquareFree out;
  if (p.is_zero()) {
    out.unit = 0;
    return out;
  }
  out.unit = p.leading_coefficient();
  std::map<int, Poly> acc;  // multiplicity -> product of factors

  std::vector<Poly> work{p.monic()};
  while (!work.empty()) {
    Poly q = work.back();
    work.pop_back();
    if (q.is_constant()) continue;
    const Atom v = *q.atoms().begin();
    const Poly c = content(q, v);
    Poly pp = *exact_div(q, c);
    if (!c.is_constant()) work.push_back(c);

    // Yun's algorithm in v on the primitive part.
    const Poly dp = pp.formal_derivative(v);
    Poly g = gcd(pp, dp);
    Poly cc = *exact_div(pp, g);
    Poly dd = *exact_div(dp, g) - cc.formal_derivative(v);
    int i = 1;
    while (!cc.is_constant()) {
      Poly f = gcd(cc, dd);
      if (!f.is_constant()) {
        auto& slot = acc[i];
        slot = slot.is_zero() ? f.monic() : (slot * f).monic();
      }
      cc = *exact_div(cc, f);
      dd = *exact_div(dd, f) - cc.formal_derivative(v);
      ++i;
    }
  }
  for (auto& [m, f] : acc) out.factors.emplace_back(f, m);
  return out;
}

namespace {

std::optional<Rational> sqrt_rational(const Rational& q) {
  if (q < 0) return std::nullopt;
  mpz_class n = q.get_num();
  mpz_class d = q.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
    return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  return Rational(rn, rd);
}

}  // namespace

std::optional<Poly> sqrt_exact(const Poly& p) {
  if (p.is_zero()) return Poly();
  const SquareFree sf = square_free(p);
  auto r = sqrt_rational(sf.unit);
  if (!r) return std::nullopt;
  Poly out(*r);
  for (const auto& [f, m] : sf.factors) {
    if (m % 2 != 0) return std::nullopt;
    out = out * f.pow(m / 2);
  }
  return out;
}

std::optional<Expr> sqrt_exact(const Expr& e) {
  auto n = sqrt_exact(e.num());
  if (!n) return std::nullopt;
  auto d = sqrt_exact(e.den());
  if (!d) return std::nullopt;
  return Expr::fraction(*n, *d);
}

Poly substitute(const Poly& p, const Atom& a, const Poly& value) {
  if (!p.contains(a)) return p;
  const auto coeffs = p.coefficients_in(a);
  Poly out;
  int last = coeffs.rbegin()->first;
  for (int d = last; d >= 0; --d) {
    out = out * value;
    auto it = coeffs.find(d);
    if (it != coeffs.end()) out += it->second;
  }
  return out;
}

namespace {

std::vector<mpz_class> divisors(mpz_class n) {
  if (n < 0) n = -n;
  std::vector<mpz_class> out;
  if (n == 0) return out;
  // Trial division is fine for the small integers produced by ansatz systems.
  if (n > 1000000) return {mpz_class(1), n};
  for (mpz_class d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      if (d * d != n) out.push_back(n / d);
    }
  }
  return out;
}

}  // namespace

std::vector<Rational> rational_roots(const Poly& p, const Atom& a) {
  std::vector<Rational> roots;
  auto coeffs = p.coefficients_in(a);
  if (coeffs.empty()) return roots;
  for (const auto& [d, c] : coeffs)
    if (!c.is_constant()) return roots;

  int shift = coeffs.begin()->first;
  if (shift > 0) roots.emplace_back(0);
  // Integer coefficients after clearing denominators.
  mpz_class l = 1;
  for (const auto& [d, c] : coeffs) {
    mpz_class den = c.constant_value().get_den();
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
  }
  std::map<int, mpz_class> ic;
  for (const auto& [d, c] : coeffs) {
    Rational v = c.constant_value() * l;
    ic[d - shift] = v.get_num();
  }
  const int deg = ic.rbegin()->first;
  if (deg == 0) return roots;
  const auto ps = divisors(ic.begin()->second);
  const auto qs = divisors(ic.rbegin()->second);
  std::set<Rational> found;
  for (const auto& pn : ps) {
    for (const auto& qd : qs) {
      for (int sign : {1, -1}) {
        Rational cand(pn * sign, qd);
        cand.canonicalize();
        Rational acc = 0;
        for (int d = deg; d >= 0; --d) {
          acc *= cand;
          auto it = ic.find(d);
          if (it != ic.end()) acc += Rational(it->second);
        }
        if (acc == 0) found.insert(cand);
      }
    }
  }
  roots.insert(roots.end(), found.begin(), found.end());
  return roots;
}

}  // namespace cascade::polyalg
