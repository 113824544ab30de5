#include <algorithm>

#include "cascade/expr.hpp"

namespace cascade {

Monomial Monomial::of(const Atom& a, int exponent) {
  Monomial m;
  if (exponent > 0) m.factors_.emplace_back(a, exponent);
  return m;
}

int Monomial::total_degree() const {
  int d = 0;
  for (const auto& f : factors_) d += f.second;
  return d;
}

int Monomial::degree(const Atom& a) const {
  for (const auto& f : factors_)
    if (f.first == a) return f.second;
  return 0;
}

Monomial Monomial::without(const Atom& a) const {
  Monomial m;
  for (const auto& f : factors_)
    if (f.first != a) m.factors_.push_back(f);
  return m;
}

Monomial Monomial::reduced(const Atom& a, int by) const {
  Monomial m;
  for (const auto& f : factors_) {
    if (f.first == a) {
      if (f.second > by) m.factors_.emplace_back(f.first, f.second - by);
    } else {
      m.factors_.push_back(f);
    }
  }
  return m;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial m;
  m.factors_.reserve(a.factors_.size() + b.factors_.size());
  auto i = a.factors_.begin();
  auto j = b.factors_.begin();
  while (i != a.factors_.end() && j != b.factors_.end()) {
    if (i->first == j->first) {
      m.factors_.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    } else if (atom_less(i->first, j->first)) {
      m.factors_.push_back(*i++);
    } else {
      m.factors_.push_back(*j++);
    }
  }
  m.factors_.insert(m.factors_.end(), i, a.factors_.end());
  m.factors_.insert(m.factors_.end(), j, b.factors_.end());
  return m;
}

bool operator==(const Monomial& a, const Monomial& b) {
  if (a.factors_.size() != b.factors_.size()) return false;
  for (std::size_t i = 0; i < a.factors_.size(); ++i) {
    if (a.factors_[i].first != b.factors_[i].first ||
        a.factors_[i].second != b.factors_[i].second)
      return false;
  }
  return true;
}

bool MonomialGreater::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.total_degree();
  const int db = b.total_degree();
  if (da != db) return da > db;
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t i = 0;
  for (; i < fa.size() && i < fb.size(); ++i) {
    if (fa[i].first != fb[i].first) return atom_less(fa[i].first, fb[i].first);
    if (fa[i].second != fb[i].second) return fa[i].second > fb[i].second;
  }
  return fa.size() > fb.size() && i < fa.size();
}

// ---------------------------------------------------------------------------

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial(), c);
}

Poly Poly::atom(const Atom& a, int exponent) {
  return term(Monomial::of(a, exponent), Rational(1));
}

Poly Poly::term(const Monomial& m, const Rational& c) {
  Poly p;
  if (c != 0) p.terms_.emplace(m, c);
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational Poly::constant_value() const {
  if (terms_.empty()) return Rational(0);
  return terms_.begin()->second;
}

Rational Poly::leading_coefficient() const {
  if (terms_.empty()) return Rational(0);
  return terms_.begin()->second;
}

const Monomial& Poly::leading_monomial() const {
  static const Monomial one;
  if (terms_.empty()) return one;
  return terms_.begin()->first;
}

std::set<Atom, AtomLess> Poly::atoms() const {
  std::set<Atom, AtomLess> out;
  for (const auto& [m, c] : terms_)
    for (const auto& f : m.factors()) out.insert(f.first);
  return out;
}

bool Poly::contains(const Atom& a) const {
  for (const auto& [m, c] : terms_)
    if (m.degree(a) > 0) return true;
  return false;
}

int Poly::degree(const Atom& a) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree(a));
  return d;
}

int Poly::total_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.total_degree());
  return d;
}

std::map<int, Poly> Poly::coefficients_in(const Atom& a) const {
  std::map<int, Poly> out;
  for (const auto& [m, c] : terms_) {
    const int d = m.degree(a);
    out[d].add_term(m.without(a), c);
  }
  for (auto it = out.begin(); it != out.end();) {
    if (it->second.is_zero())
      it = out.erase(it);
    else
      ++it;
  }
  return out;
}

Poly Poly::from_coefficients(const std::map<int, Poly>& coeffs, const Atom& a) {
  Poly out;
  for (const auto& [d, p] : coeffs) {
    const Monomial md = Monomial::of(a, d);
    for (const auto& [m, c] : p.terms_) out.add_term(m * md, c);
  }
  return out;
}

Poly Poly::coefficient_of_degree(const Atom& a, int d) const {
  Poly out;
  for (const auto& [m, c] : terms_)
    if (m.degree(a) == d) out.add_term(m.without(a), c);
  return out;
}

Poly Poly::formal_derivative(const Atom& a) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    const int d = m.degree(a);
    if (d == 0) continue;
    out.add_term(m.reduced(a, 1), c * d);
  }
  return out;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly& Poly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  if (a.is_zero() || b.is_zero()) return out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  auto i = a.terms_.begin();
  auto j = b.terms_.begin();
  for (; i != a.terms_.end(); ++i, ++j) {
    if (!(i->first == j->first) || i->second != j->second) return false;
  }
  return true;
}

Poly Poly::pow(int e) const {
  Poly result(1);
  Poly base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

Poly Poly::monic() const {
  if (is_zero()) return *this;
  Poly out = *this;
  out *= Rational(1) / leading_coefficient();
  return out;
}

}  // namespace cascade
