#include "cascade/lpdo.hpp"

#include "cascade/polyalg.hpp"

namespace cascade {

bool MultiIndexGreater::operator()(const MultiIndex& a, const MultiIndex& b) const {
  int ta = 0, tb = 0;
  for (int x : a) ta += x;
  for (int x : b) tb += x;
  if (ta != tb) return ta > tb;
  return a > b;
}

namespace {

int total(const MultiIndex& a) {
  int t = 0;
  for (int x : a) t += x;
  return t;
}

Expr partial(const Expr& u, const Variables& vars, const MultiIndex& alpha) {
  Expr out = u;
  for (std::size_t i = 0; i < vars.size() && !out.is_zero(); ++i)
    out = diff(out, vars[i], alpha[i]);
  return out;
}

long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// All gamma <= alpha componentwise.
std::vector<MultiIndex> sub_indices(const MultiIndex& alpha) {
  std::vector<MultiIndex> out{{}};
  for (int a : alpha) {
    std::vector<MultiIndex> next;
    for (const auto& g : out)
      for (int k = 0; k <= a; ++k) {
        auto n = g;
        n.push_back(k);
        next.push_back(std::move(n));
      }
    out = std::move(next);
  }
  return out;
}

std::string derivation_text(const Variables& vars, const MultiIndex& alpha) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (alpha[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += "D" + vars[i];
    if (alpha[i] > 1) out += "^" + std::to_string(alpha[i]);
  }
  return out;
}

bool is_negative_term(const Expr& c) {
  return c.num().size() == 1 && c.num().leading_coefficient() < 0;
}

void check_same_vars(const Variables& a, const Variables& b) {
  if (a != b) throw Error(ErrorKind::Consistency, "operators over different variable sets");
}

}  // namespace

LinearOperator::LinearOperator(Variables vars) : vars_(std::move(vars)) {}

LinearOperator LinearOperator::scalar(const Variables& vars, const Expr& c) {
  LinearOperator op(vars);
  op.add_term(MultiIndex(vars.size(), 0), c);
  return op;
}

LinearOperator LinearOperator::derivation(const Variables& vars, std::size_t i) {
  MultiIndex a(vars.size(), 0);
  a[i] = 1;
  return monomial(vars, a);
}

LinearOperator LinearOperator::monomial(const Variables& vars, const MultiIndex& alpha, const Expr& c) {
  LinearOperator op(vars);
  op.add_term(alpha, c);
  return op;
}

Expr LinearOperator::coefficient(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Expr(0) : it->second;
}

void LinearOperator::add_term(const MultiIndex& alpha, const Expr& c) {
  if (alpha.size() != vars_.size())
    throw Error(ErrorKind::Consistency, "multi-index size does not match variables");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

int LinearOperator::order() const {
  if (terms_.empty()) return -1;
  return total(terms_.begin()->first);
}

LinearOperator LinearOperator::homogeneous_part(int ord) const {
  LinearOperator out(vars_);
  for (const auto& [a, c] : terms_)
    if (total(a) == ord) out.add_term(a, c);
  return out;
}

LinearOperator& LinearOperator::operator+=(const LinearOperator& o) {
  if (vars_.empty()) vars_ = o.vars_;
  check_same_vars(vars_, o.vars_);
  for (const auto& [a, c] : o.terms_) add_term(a, c);
  return *this;
}

LinearOperator& LinearOperator::operator-=(const LinearOperator& o) {
  if (vars_.empty()) vars_ = o.vars_;
  check_same_vars(vars_, o.vars_);
  for (const auto& [a, c] : o.terms_) add_term(a, -c);
  return *this;
}

LinearOperator operator*(const Expr& c, const LinearOperator& a) {
  LinearOperator out(a.vars_);
  for (const auto& [al, v] : a.terms_) out.add_term(al, c * v);
  return out;
}

bool operator==(const LinearOperator& a, const LinearOperator& b) {
  if (a.vars_ != b.vars_ || a.terms_.size() != b.terms_.size()) return false;
  auto i = a.terms_.begin();
  auto j = b.terms_.begin();
  for (; i != a.terms_.end(); ++i, ++j)
    if (i->first != j->first || i->second != j->second) return false;
  return true;
}

std::string LinearOperator::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [alpha, c] : terms_) {
    const bool neg = is_negative_term(c);
    const Expr mag = neg ? -c : c;
    const std::string d = derivation_text(vars_, alpha);
    std::string t;
    if (d.empty()) {
      t = mag.str();
    } else if (mag == Expr(1)) {
      t = d;
    } else {
      std::string cs = mag.str();
      if (mag.den().is_constant() && mag.num().size() > 1) cs = "(" + cs + ")";
      t = cs + "*" + d;
    }
    if (first)
      out += neg ? "-" + t : t;
    else
      out += (neg ? " - " : " + ") + t;
    first = false;
  }
  return out;
}

// ---------------------------------------------------------------------------

FirstOrderOperator::FirstOrderOperator(Variables vars, std::vector<Expr> field, Expr zeroth)
    : vars_(std::move(vars)), field_(std::move(field)), zeroth_(std::move(zeroth)) {
  if (field_.size() != vars_.size())
    throw Error(ErrorKind::Consistency, "first-order operator field size mismatch");
}

FirstOrderOperator FirstOrderOperator::from_operator(const LinearOperator& op) {
  if (op.order() > 1) throw Error(ErrorKind::Consistency, "operator is not of first order");
  const auto& vars = op.vars();
  std::vector<Expr> field(vars.size(), Expr(0));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    MultiIndex a(vars.size(), 0);
    a[i] = 1;
    field[i] = op.coefficient(a);
  }
  return {vars, field, op.coefficient(MultiIndex(vars.size(), 0))};
}

bool FirstOrderOperator::has_zero_field() const {
  for (const auto& c : field_)
    if (!c.is_zero()) return false;
  return true;
}

std::optional<std::size_t> FirstOrderOperator::leading_index() const {
  for (std::size_t i = 0; i < field_.size(); ++i)
    if (!field_[i].is_zero()) return i;
  return std::nullopt;
}

FirstOrderOperator FirstOrderOperator::normalized() const {
  auto i = leading_index();
  if (!i) return *this;
  return scaled(field_[*i].inverse());
}

Expr FirstOrderOperator::apply(const Expr& u) const {
  Expr out = zeroth_ * u;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (!field_[i].is_zero()) out += field_[i] * diff(u, vars_[i]);
  return out;
}

LinearOperator FirstOrderOperator::to_operator() const {
  LinearOperator op(vars_);
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    MultiIndex a(vars_.size(), 0);
    a[i] = 1;
    op.add_term(a, field_[i]);
  }
  op.add_term(MultiIndex(vars_.size(), 0), zeroth_);
  return op;
}

FirstOrderOperator FirstOrderOperator::scaled(const Expr& c) const {
  std::vector<Expr> f;
  for (const auto& x : field_) f.push_back(c * x);
  return {vars_, f, c * zeroth_};
}

FirstOrderOperator operator+(const FirstOrderOperator& a, const FirstOrderOperator& b) {
  check_same_vars(a.vars_, b.vars_);
  std::vector<Expr> f;
  for (std::size_t i = 0; i < a.field_.size(); ++i) f.push_back(a.field_[i] + b.field_[i]);
  return {a.vars_, f, a.zeroth_ + b.zeroth_};
}

FirstOrderOperator operator-(const FirstOrderOperator& a, const FirstOrderOperator& b) {
  return a + b.scaled(Expr(-1));
}

bool operator==(const FirstOrderOperator& a, const FirstOrderOperator& b) {
  return a.vars_ == b.vars_ && a.field_ == b.field_ && a.zeroth_ == b.zeroth_;
}

std::string FirstOrderOperator::str() const { return to_operator().str(); }

// ---------------------------------------------------------------------------

Expr SymbolPolynomial::coefficient(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  auto it = terms_.find({i, j});
  return it == terms_.end() ? Expr(0) : it->second;
}

void SymbolPolynomial::add(std::size_t i, std::size_t j, const Expr& c) {
  if (i > j) std::swap(i, j);
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(std::make_pair(i, j), c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

bool operator==(const SymbolPolynomial& a, const SymbolPolynomial& b) {
  return a.vars_ == b.vars_ && a.terms_ == b.terms_;
}

SymbolPolynomial SymbolPolynomial::product(const FirstOrderOperator& a, const FirstOrderOperator& b) {
  SymbolPolynomial s(a.vars());
  for (std::size_t i = 0; i < a.vars().size(); ++i)
    for (std::size_t j = 0; j < a.vars().size(); ++j) s.add(i, j, a.coefficient(i) * b.coefficient(j));
  return s;
}

std::string SymbolPolynomial::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [ij, c] : terms_) {
    const bool neg = is_negative_term(c);
    const Expr mag = neg ? -c : c;
    std::string mono = "xi" + std::to_string(ij.first + 1);
    mono += ij.first == ij.second ? "^2" : "*xi" + std::to_string(ij.second + 1);
    std::string t;
    if (mag == Expr(1)) {
      t = mono;
    } else {
      std::string cs = mag.str();
      if (mag.den().is_constant() && mag.num().size() > 1) cs = "(" + cs + ")";
      t = cs + "*" + mono;
    }
    out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
    out += t;
    first = false;
  }
  return out;
}

// ---------------------------------------------------------------------------

Expr apply(const LinearOperator& op, const Expr& u) {
  Expr out(0);
  for (const auto& [alpha, c] : op.terms()) out += c * partial(u, op.vars(), alpha);
  return out;
}

LinearOperator compose(const LinearOperator& a, const LinearOperator& b) {
  check_same_vars(a.vars(), b.vars());
  const Variables& vars = a.vars();
  LinearOperator out(vars);
  std::map<std::pair<MultiIndex, MultiIndex>, Expr> dcache;
  for (const auto& [alpha, ca] : a.terms()) {
    for (const auto& [beta, cb] : b.terms()) {
      for (const auto& gamma : sub_indices(alpha)) {
        auto key = std::make_pair(beta, gamma);
        auto it = dcache.find(key);
        if (it == dcache.end()) it = dcache.emplace(key, partial(cb, vars, gamma)).first;
        if (it->second.is_zero()) continue;
        long mult = 1;
        MultiIndex target(vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i) {
          mult *= binom(alpha[i], gamma[i]);
          target[i] = alpha[i] - gamma[i] + beta[i];
        }
        out.add_term(target, ca * Expr(static_cast<int>(mult)) * it->second);
      }
    }
  }
  return out;
}

FirstOrderOperator commutator(const FirstOrderOperator& a, const FirstOrderOperator& b) {
  check_same_vars(a.vars(), b.vars());
  if (!a.is_pure() || !b.is_pure())
    throw Error(ErrorKind::Precondition, "commutator expects pure first-order operators");
  std::vector<Expr> f;
  for (std::size_t i = 0; i < a.vars().size(); ++i)
    f.push_back(a.apply(b.coefficient(i)) - b.apply(a.coefficient(i)));
  return {a.vars(), f, Expr(0)};
}

LinearOperator gauge(const LinearOperator& op, const Expr& lambda) {
  const auto& vars = op.vars();
  return compose(LinearOperator::scalar(vars, lambda.inverse()),
                 compose(op, LinearOperator::scalar(vars, lambda)));
}

SymbolPolynomial principal_symbol(const LinearOperator& op) {
  if (op.order() != 2)
    throw Error(ErrorKind::UnsupportedOrder,
                "principal symbol requires an operator of order 2 (got " + std::to_string(op.order()) + ")");
  SymbolPolynomial s(op.vars());
  for (const auto& [alpha, c] : op.terms()) {
    if (total(alpha) != 2) continue;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < alpha.size(); ++i)
      for (int k = 0; k < alpha[i]; ++k) idx.push_back(i);
    s.add(idx[0], idx[1], c);
  }
  return s;
}

const char* to_string(FactorStatus s) {
  switch (s) {
    case FactorStatus::Factored: return "factored";
    case FactorStatus::NotFactorable: return "not factorable over field";
    case FactorStatus::Repeated: return "degenerate (repeated factor)";
  }
  return "?";
}

namespace {

bool proportional(const FirstOrderOperator& a, const FirstOrderOperator& b) {
  const std::size_t n = a.vars().size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(a.coefficient(i) * b.coefficient(j) - a.coefficient(j) * b.coefficient(i)).is_zero())
        return false;
  return true;
}

SymbolFactorization finish(const SymbolPolynomial& s, const FirstOrderOperator& f1_raw,
                           const FirstOrderOperator& f2_raw) {
  SymbolFactorization out;
  FirstOrderOperator f1 = f1_raw.normalized();
  // Scale of f2 is fixed by requiring f1*f2 == s exactly.
  const std::size_t lead = *f1_raw.leading_index();
  FirstOrderOperator f2 = f2_raw.scaled(f1_raw.coefficient(lead));
  if (!(SymbolPolynomial::product(f1, f2) == s))
    throw Error(ErrorKind::Consistency, "symbol factorization does not reproduce the symbol");
  if (proportional(f1, f2)) {
    out.status = FactorStatus::Repeated;
    return out;
  }
  out.status = FactorStatus::Factored;
  out.factors = std::make_pair(f1, f2);
  return out;
}

}  // namespace

SymbolFactorization factor_symbol(const SymbolPolynomial& s) {
  const Variables& vars = s.vars();
  const std::size_t n = vars.size();
  SymbolFactorization out;
  if (s.terms().empty()) return out;

  auto linear = [&](std::vector<Expr> c) { return FirstOrderOperator(vars, std::move(c), Expr(0)); };

  // Quadratic in some xi_k with nonzero square coefficient.
  for (std::size_t k = 0; k < n; ++k) {
    const Expr a = s.coefficient(k, k);
    if (a.is_zero()) continue;
    // s = a xi_k^2 + B xi_k + C, B linear and C quadratic in the other xi.
    std::vector<Expr> B(n, Expr(0));
    for (std::size_t i = 0; i < n; ++i)
      if (i != k) B[i] = s.coefficient(i, k);
    // Discriminant D = B^2 - 4 a C as a quadratic form in the remaining xi.
    std::map<std::pair<std::size_t, std::size_t>, Expr> D;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      for (std::size_t j = i; j < n; ++j) {
        if (j == k) continue;
        Expr bb = (i == j) ? B[i] * B[i] : Expr(2) * B[i] * B[j];
        D[{i, j}] = bb - Expr(4) * a * s.coefficient(i, j);
      }
    }
    // Perfect square of a linear form sum d_i xi_i?
    std::vector<Expr> d(n, Expr(0));
    bool all_zero = true;
    for (const auto& [ij, c] : D)
      if (!c.is_zero()) all_zero = false;
    if (!all_zero) {
      std::optional<std::size_t> pivot;
      for (std::size_t i = 0; i < n && !pivot; ++i)
        if (i != k && !D[{i, i}].is_zero()) pivot = i;
      if (!pivot) return out;  // only cross terms: not a square
      auto root = polyalg::sqrt_exact(D[{*pivot, *pivot}]);
      if (!root) return out;
      d[*pivot] = *root;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k || j == *pivot) continue;
        const auto key = std::make_pair(std::min(*pivot, j), std::max(*pivot, j));
        d[j] = D[key] / (Expr(2) * *root);
      }
      for (const auto& [ij, c] : D) {
        const Expr expect = (ij.first == ij.second) ? d[ij.first] * d[ij.first]
                                                    : Expr(2) * d[ij.first] * d[ij.second];
        if (expect != c) return out;
      }
    }
    // Roots xi_k = (-B +- d) / (2a): factors xi_k - r.
    std::vector<Expr> f1(n), f2(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) {
        f1[i] = Expr(1);
        f2[i] = Expr(1);
      } else {
        f1[i] = (B[i] - d[i]) / (Expr(2) * a);
        f2[i] = (B[i] + d[i]) / (Expr(2) * a);
      }
    }
    FirstOrderOperator F1 = linear(f1);
    FirstOrderOperator F2 = linear(f2).scaled(a);
    return finish(s, F1, F2);
  }

  // No squares: s is bilinear. It factors as xi_k * (sum_j s_kj xi_j) when
  // every monomial involves xi_k.
  for (std::size_t k = 0; k < n; ++k) {
    bool ok = true;
    for (const auto& [ij, c] : s.terms())
      if (ij.first != k && ij.second != k) ok = false;
    if (!ok) continue;
    std::vector<Expr> f1(n, Expr(0)), f2(n, Expr(0));
    f1[k] = Expr(1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != k) f2[j] = s.coefficient(k, j);
    return finish(s, linear(f1), linear(f2));
  }
  return out;
}

Expr field_determinant(const std::vector<FirstOrderOperator>& rows) {
  const std::size_t n = rows.size();
  auto at = [&](std::size_t r, std::size_t c) { return rows[r].coefficient(c); };
  if (n == 1) return at(0, 0);
  if (n == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
  if (n == 3) {
    return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
           at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
           at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  }
  throw Error(ErrorKind::Unsupported, "determinants are only needed for 1..3 rows");
}

std::array<Expr, 3> decompose_in_frame(const FirstOrderOperator& w,
                                       const std::array<FirstOrderOperator, 3>& basis) {
  if (w.vars().size() != 3) throw Error(ErrorKind::Precondition, "frame decomposition needs 3 variables");
  const Expr det = field_determinant({basis[0], basis[1], basis[2]});
  if (det.is_zero())
    throw Error(ErrorKind::Genericity,
                "frame is singular: the operators do not span the tangent space (operator is not generic)");
  std::array<Expr, 3> out;
  for (std::size_t k = 0; k < 3; ++k) {
    std::array<FirstOrderOperator, 3> m = basis;
    m[k] = w.pure();
    out[k] = field_determinant({m[0], m[1], m[2]}) / det;
  }
  return out;
}

std::optional<std::array<Expr, 2>> decompose_in_span(const FirstOrderOperator& w,
                                                     const FirstOrderOperator& b1,
                                                     const FirstOrderOperator& b2) {
  const std::size_t n = w.vars().size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Expr det = b1.coefficient(i) * b2.coefficient(j) - b1.coefficient(j) * b2.coefficient(i);
      if (det.is_zero()) continue;
      const Expr c1 = (w.coefficient(i) * b2.coefficient(j) - w.coefficient(j) * b2.coefficient(i)) / det;
      const Expr c2 = (b1.coefficient(i) * w.coefficient(j) - b1.coefficient(j) * w.coefficient(i)) / det;
      for (std::size_t k = 0; k < n; ++k)
        if (c1 * b1.coefficient(k) + c2 * b2.coefficient(k) != w.coefficient(k)) return std::nullopt;
      return std::array<Expr, 2>{c1, c2};
    }
  }
  return std::nullopt;
}

std::pair<FirstOrderOperator, Expr> first_order_remainder(const LinearOperator& op,
                                                          const FirstOrderOperator& a,
                                                          const FirstOrderOperator& b) {
  const LinearOperator r = op - compose(a.to_operator(), b.to_operator());
  if (r.order() > 1)
    throw Error(ErrorKind::Consistency, "principal part is not reproduced by the factor product");
  const auto f = FirstOrderOperator::from_operator(r);
  return {f.pure(), f.zeroth()};
}

}  // namespace cascade
