#include <sstream>

#include "cascade/expr.hpp"
#include "cascade/polyalg.hpp"

namespace cascade {
namespace {

std::string rational_text(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string factor_text(const Atom& a, int e) {
  std::string s = atom_text(*a);
  if (e != 1) s += "^" + std::to_string(e);
  return s;
}

// Term text for |c| * m.
std::string term_text(const Monomial& m, const Rational& c) {
  const Rational ac = abs(c);
  if (m.is_one()) return rational_text(ac);
  std::string out;
  if (ac.get_num() != 1) out += ac.get_num().get_str() + "*";
  bool first = true;
  for (const auto& [a, e] : m.factors()) {
    if (!first) out += "*";
    out += factor_text(a, e);
    first = false;
  }
  if (ac.get_den() != 1) out += "/" + ac.get_den().get_str();
  return out;
}

std::string poly_text(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const bool neg = c < 0;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    out += term_text(m, c);
    first = false;
  }
  return out;
}

bool is_single_atom(const Poly& p) {
  if (p.size() != 1) return false;
  const auto& [m, c] = *p.terms().begin();
  return c == 1 && m.factors().size() == 1 && m.factors()[0].second == 1;
}

std::string denominator_text(const Poly& den) {
  const auto sf = polyalg::square_free(den);
  std::vector<std::string> parts;
  for (const auto& [f, mult] : sf.factors) {
    std::string t = poly_text(f);
    if (!is_single_atom(f)) t = "(" + t + ")";
    if (mult != 1) t += "^" + std::to_string(mult);
    parts.push_back(t);
  }
  std::string out;
  if (sf.unit != 1) parts.insert(parts.begin(), rational_text(sf.unit));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "*";
    out += parts[i];
  }
  if (parts.size() > 1) out = "(" + out + ")";
  return out;
}

}  // namespace

std::string atom_text(const AtomData& a) {
  switch (a.kind) {
    case AtomKind::Variable:
      return a.name;
    case AtomKind::Function: {
      std::string s = a.name;
      int order = 0;
      for (int d : a.derivative) order += d;
      if (order > 0) {
        if (a.derivative.size() == 1 && order <= 3) {
          s += std::string(order, '\'');
        } else {
          s += "'[";
          for (std::size_t i = 0; i < a.derivative.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(a.derivative[i]);
          }
          s += "]";
        }
      }
      s += "(";
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) s += ", ";
        s += a.args[i].str();
      }
      return s + ")";
    }
    case AtomKind::Exp:
      return "exp(" + a.args[0].str() + ")";
    case AtomKind::Log:
      return "ln(" + a.args[0].str() + ")";
    case AtomKind::Integral:
      return "int(" + a.args[0].str() + ", " + a.name + ")";
  }
  return "?";
}

std::string Expr::str() const {
  if (den().is_constant()) return poly_text(num());
  std::string n = poly_text(num());
  if (num().size() > 1) n = "(" + n + ")";
  return n + "/" + denominator_text(den());
}

}  // namespace cascade
