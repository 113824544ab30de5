#include "cascade/expr.hpp"

#include <mutex>
#include <unordered_map>

#include "cascade/polyalg.hpp"

namespace cascade {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Degenerate: return "degenerate-input";
    case ErrorKind::Parse: return "syntax-error";
    case ErrorKind::UnknownVariable: return "unknown-variable";
    case ErrorKind::NotFactorable: return "not-factorable";
    case ErrorKind::RepeatedFactor: return "degenerate-repeated-factor";
    case ErrorKind::Hyperbolicity: return "not-strictly-hyperbolic";
    case ErrorKind::Genericity: return "genericity-violation";
    case ErrorKind::Precondition: return "precondition-violated";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Consistency: return "internal-consistency-failure";
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
  }
  return "error";
}

bool atom_less(const Atom& a, const Atom& b) {
  if (a == b) return false;
  if (a->kind != b->kind) return static_cast<int>(a->kind) < static_cast<int>(b->kind);
  return a->key < b->key;
}

// ---------------------------------------------------------------------------
// Atom interning

namespace {

std::mutex& intern_mutex() {
  static std::mutex m;
  return m;
}

std::unordered_map<std::string, std::weak_ptr<const AtomData>>& intern_table() {
  static std::unordered_map<std::string, std::weak_ptr<const AtomData>> t;
  return t;
}

Atom intern(AtomData data) {
  std::lock_guard<std::mutex> lock(intern_mutex());
  auto& table = intern_table();
  const std::string full_key = std::to_string(static_cast<int>(data.kind)) + "|" + data.key;
  auto it = table.find(full_key);
  if (it != table.end()) {
    if (auto existing = it->second.lock()) return existing;
  }
  auto atom = std::make_shared<const AtomData>(std::move(data));
  table[full_key] = atom;
  return atom;
}

std::set<std::string> expr_depends(const Expr& e) {
  std::set<std::string> out;
  for (const auto& a : e.atoms()) out.insert(a->depends.begin(), a->depends.end());
  return out;
}

}  // namespace

Atom make_variable_atom(const std::string& name) {
  AtomData d{AtomKind::Variable, name, {}, {}, name, {name}};
  return intern(std::move(d));
}

Atom make_function_atom(const std::string& name, std::vector<int> derivative,
                        std::vector<Expr> args) {
  if (derivative.size() != args.size())
    throw Error(ErrorKind::Consistency, "function derivative annotation arity mismatch");
  AtomData d;
  d.kind = AtomKind::Function;
  d.name = name;
  d.derivative = std::move(derivative);
  d.args = std::move(args);
  for (const auto& a : d.args) {
    auto deps = expr_depends(a);
    d.depends.insert(deps.begin(), deps.end());
  }
  d.key = atom_text(d);
  return intern(std::move(d));
}

Atom make_exp_atom(const Expr& arg) {
  AtomData d;
  d.kind = AtomKind::Exp;
  d.name = "exp";
  d.args = {arg};
  d.depends = expr_depends(arg);
  d.key = atom_text(d);
  return intern(std::move(d));
}

Atom make_log_atom(const Expr& arg) {
  AtomData d;
  d.kind = AtomKind::Log;
  d.name = "ln";
  d.args = {arg};
  d.depends = expr_depends(arg);
  d.key = atom_text(d);
  return intern(std::move(d));
}

Atom make_integral_atom(const Expr& integrand, const std::string& var) {
  AtomData d;
  d.kind = AtomKind::Integral;
  d.name = var;
  d.args = {integrand};
  d.depends = expr_depends(integrand);
  d.depends.insert(var);
  d.key = atom_text(d);
  return intern(std::move(d));
}

// ---------------------------------------------------------------------------
// Canonical representation

struct Expr::Rep {
  Poly num;
  Poly den;
};

namespace {

bool has_exp_atoms(const Poly& p) {
  for (const auto& [m, c] : p.terms())
    for (const auto& f : m.factors())
      if (f.first->kind == AtomKind::Exp) return true;
  return false;
}

// Collapses all exp atoms of a monomial into a single exp of the summed argument.
Poly merge_exponentials(const Poly& p) {
  if (!has_exp_atoms(p)) return p;
  Poly out;
  for (const auto& [m, c] : p.terms()) {
    int count = 0;
    for (const auto& f : m.factors())
      if (f.first->kind == AtomKind::Exp) count += f.second;
    if (count <= 1) {
      out.add_term(m, c);
      continue;
    }
    Expr arg(0);
    Monomial rest;
    for (const auto& f : m.factors()) {
      if (f.first->kind == AtomKind::Exp)
        arg += f.first->args[0] * Expr(f.second);
      else
        rest = rest * Monomial::of(f.first, f.second);
    }
    if (arg.is_zero())
      out.add_term(rest, c);
    else
      out.add_term(rest * Monomial::of(make_exp_atom(arg)), c);
  }
  return out;
}

}  // namespace

Expr::Expr() : Expr(0) {}

Expr::Expr(int c) : Expr(Rational(c)) {}

Expr::Expr(const Rational& c) {
  auto rep = std::make_shared<Rep>();
  rep->num = Poly(c);
  rep->den = Poly(1);
  rep_ = std::move(rep);
}

Expr::Expr(const Poly& p) {
  auto rep = std::make_shared<Rep>();
  rep->num = merge_exponentials(p);
  rep->den = Poly(1);
  rep_ = std::move(rep);
}

Expr Expr::fraction(const Poly& num_in, const Poly& den_in) {
  if (den_in.is_zero()) throw Error(ErrorKind::Degenerate, "division by zero");
  Poly num = merge_exponentials(num_in);
  Poly den = merge_exponentials(den_in);
  if (num.is_zero()) return Expr(0);

  // A single-monomial denominator carrying exp(a) moves to the numerator as exp(-a).
  if (den.size() == 1) {
    const auto& [m, c] = *den.terms().begin();
    Poly moved;
    Monomial keep;
    bool any = false;
    for (const auto& f : m.factors()) {
      if (f.first->kind == AtomKind::Exp) {
        any = true;
        Poly e = Poly::atom(make_exp_atom(-(f.first->args[0] * Expr(f.second))));
        moved = moved.is_zero() ? e : moved * e;
      } else {
        keep = keep * Monomial::of(f.first, f.second);
      }
    }
    if (any) {
      num = merge_exponentials(num * moved);
      den = Poly::term(keep, c);
    }
  }

  if (den.is_constant()) {
    const Rational inv = Rational(1) / den.constant_value();
    num *= inv;
    auto rep = std::make_shared<Rep>();
    rep->num = std::move(num);
    rep->den = Poly(1);
    return Expr(std::shared_ptr<const Rep>(std::move(rep)));
  }

  const Poly g = polyalg::gcd(num, den);
  if (!g.is_constant()) {
    num = *polyalg::exact_div(num, g);
    den = *polyalg::exact_div(den, g);
  }
  const Rational lc = den.leading_coefficient();
  if (lc != 1) {
    const Rational inv = Rational(1) / lc;
    num *= inv;
    den *= inv;
  }
  auto rep = std::make_shared<Rep>();
  rep->num = std::move(num);
  rep->den = std::move(den);
  return Expr(std::shared_ptr<const Rep>(std::move(rep)));
}

Expr Expr::variable(const std::string& name) { return from_atom(make_variable_atom(name)); }

Expr Expr::from_atom(const Atom& a) { return Expr(Poly::atom(a)); }

const Poly& Expr::num() const { return rep_->num; }
const Poly& Expr::den() const { return rep_->den; }

Rational Expr::constant_value() const {
  return num().constant_value() / den().constant_value();
}

std::set<Atom, AtomLess> Expr::atoms() const {
  auto a = num().atoms();
  auto b = den().atoms();
  a.insert(b.begin(), b.end());
  return a;
}

const std::string* Expr::as_variable() const {
  if (!den().is_constant() || den().constant_value() != 1 || num().size() != 1) return nullptr;
  const auto& [m, c] = *num().terms().begin();
  if (c != 1 || m.factors().size() != 1 || m.factors()[0].second != 1) return nullptr;
  const Atom& a = m.factors()[0].first;
  if (a->kind != AtomKind::Variable) return nullptr;
  return &a->name;
}

Expr Expr::operator-() const {
  auto rep = std::make_shared<Rep>();
  rep->num = -num();
  rep->den = den();
  return Expr(std::shared_ptr<const Rep>(std::move(rep)));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den() == b.den()) {
    if (a.den().is_constant()) return Expr(a.num() + b.num());
    return Expr::fraction(a.num() + b.num(), a.den());
  }
  if (a.den().is_constant()) return Expr::fraction(a.num() * b.den() + b.num(), b.den());
  if (b.den().is_constant()) return Expr::fraction(a.num() + b.num() * a.den(), a.den());
  const Poly g = polyalg::gcd(a.den(), b.den());
  if (g.is_constant())
    return Expr::fraction(a.num() * b.den() + b.num() * a.den(), a.den() * b.den());
  const Poly ca = *polyalg::exact_div(b.den(), g);  // multiplier for a
  const Poly cb = *polyalg::exact_div(a.den(), g);  // multiplier for b
  return Expr::fraction(a.num() * ca + b.num() * cb, a.den() * ca);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr(0);
  if (a.den().is_constant() && b.den().is_constant()) return Expr(a.num() * b.num());
  return Expr::fraction(a.num() * b.num(), a.den() * b.den());
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw Error(ErrorKind::Degenerate, "division by an expression that is identically zero");
  if (a.is_zero()) return Expr(0);
  return Expr::fraction(a.num() * b.den(), a.den() * b.num());
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.rep_ == b.rep_) return true;
  return a.num() == b.num() && a.den() == b.den();
}

Expr Expr::pow(int e) const {
  if (e == 0) return Expr(1);
  if (e < 0) return inverse().pow(-e);
  if (den().is_constant()) return Expr(num().pow(e));
  return fraction(num().pow(e), den().pow(e));
}

Expr Expr::inverse() const { return Expr(1) / *this; }

// ---------------------------------------------------------------------------

Expr var(const std::string& name) { return Expr::variable(name); }

Expr func(const std::string& name, std::vector<Expr> args) {
  std::vector<int> d(args.size(), 0);
  return func_derivative(name, std::move(d), std::move(args));
}

Expr func_derivative(const std::string& name, std::vector<int> derivative,
                     std::vector<Expr> args) {
  return Expr::from_atom(make_function_atom(name, std::move(derivative), std::move(args)));
}

Expr exp(const Expr& arg) {
  if (arg.is_zero()) return Expr(1);
  if (!arg.den().is_constant()) return Expr::from_atom(make_exp_atom(arg));
  const Rational scale = Rational(1) / arg.den().constant_value();
  Expr factor(1);
  Poly rest;
  for (const auto& [m, c] : arg.num().terms()) {
    const Rational coef = c * scale;
    if (m.factors().size() == 1 && m.factors()[0].second == 1 &&
        m.factors()[0].first->kind == AtomKind::Log && coef.get_den() == 1 &&
        abs(coef.get_num()) <= 64) {
      factor *= m.factors()[0].first->args[0].pow(static_cast<int>(coef.get_num().get_si()));
    } else {
      rest.add_term(m, coef);
    }
  }
  if (rest.is_zero()) return factor;
  return factor * Expr::from_atom(make_exp_atom(Expr(rest)));
}

Expr ln(const Expr& arg) {
  if (arg.is_zero()) throw Error(ErrorKind::Degenerate, "ln(0)");
  if (arg == Expr(1)) return Expr(0);
  if (arg.den().is_constant() && arg.den().constant_value() == 1 && arg.num().size() == 1) {
    const auto& [m, c] = *arg.num().terms().begin();
    if (c == 1 && m.factors().size() == 1 && m.factors()[0].second == 1 &&
        m.factors()[0].first->kind == AtomKind::Exp)
      return m.factors()[0].first->args[0];
  }
  return Expr::from_atom(make_log_atom(arg));
}

Expr integral_node(const Expr& integrand, const std::string& v) {
  if (integrand.is_zero()) return Expr(0);
  const Rational c = integrand.num().leading_coefficient();
  return Expr(c) * Expr::from_atom(make_integral_atom(integrand * Expr(Rational(1) / c), v));
}

bool depends_on(const Expr& e, const std::string& v) {
  for (const auto& a : e.atoms())
    if (a->depends.count(v)) return true;
  return false;
}

namespace {

bool atom_contains_kind(const Atom& a, AtomKind kind) {
  if (a->kind == kind) return true;
  for (const auto& arg : a->args)
    if (contains_kind(arg, kind)) return true;
  return false;
}

void collect_functions(const Expr& e, std::map<std::string, std::size_t>& out) {
  for (const auto& a : e.atoms()) {
    if (a->kind == AtomKind::Function) out[a->name] = a->args.size();
    for (const auto& arg : a->args) collect_functions(arg, out);
  }
}

}  // namespace

bool contains_kind(const Expr& e, AtomKind kind) {
  for (const auto& a : e.atoms())
    if (atom_contains_kind(a, kind)) return true;
  return false;
}

std::map<std::string, std::size_t> function_symbols(const Expr& e) {
  std::map<std::string, std::size_t> out;
  collect_functions(e, out);
  return out;
}

}  // namespace cascade
