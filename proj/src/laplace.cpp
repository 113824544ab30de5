#include "cascade/laplace.hpp"

#include <algorithm>
#include <random>

namespace cascade {
namespace {

std::pair<Expr, Expr> span_coefficients(const FirstOrderOperator& w, const FirstOrderOperator& x1,
                                        const FirstOrderOperator& x2, const char* what) {
  if (w.has_zero_field()) return {Expr(0), Expr(0)};
  auto c = decompose_in_span(w, x1, x2);
  if (!c) throw Error(ErrorKind::Precondition, std::string(what) + " is not in the span of X1, X2");
  return {(*c)[0], (*c)[1]};
}

LinearOperator op_of(const FirstOrderOperator& x, const Expr& zeroth) {
  return x.with_zeroth(zeroth).to_operator();
}

}  // namespace

bool expr_is_zero(const Expr& e) { return is_zero(e).is_zero(); }

CharacteristicForm characteristic_form(const LinearOperator& op) {
  const SymbolFactorization fac = factor_symbol(principal_symbol(op));
  switch (fac.status) {
    case FactorStatus::NotFactorable:
      throw Error(ErrorKind::Hyperbolicity,
                  "principal symbol " + principal_symbol(op).str() + " is not factorable over the coefficient field");
    case FactorStatus::Repeated:
      throw Error(ErrorKind::Hyperbolicity,
                  "principal symbol " + principal_symbol(op).str() + " has a repeated factor");
    case FactorStatus::Factored:
      break;
  }
  return characteristic_form(op, fac.factors->first, fac.factors->second);
}

CharacteristicForm characteristic_form(const LinearOperator& op, const FirstOrderOperator& x1,
                                       const FirstOrderOperator& x2) {
  CharacteristicForm f;
  f.op = op;
  f.X1 = x1.pure();
  f.X2 = x2.pure();
  const auto [r1, z1] = first_order_remainder(op, f.X1, f.X2);
  std::tie(f.alpha1, f.alpha2) = span_coefficients(r1, f.X1, f.X2, "first-order part");
  f.alpha3 = z1;
  const auto [r2, z2] = first_order_remainder(op, f.X2, f.X1);
  std::tie(f.alphabar1, f.alphabar2) = span_coefficients(r2, f.X1, f.X2, "first-order part");
  if (z2 != z1) throw Error(ErrorKind::Consistency, "orderings disagree on the zeroth-order term");
  std::tie(f.P, f.Q) = span_coefficients(commutator(f.X1, f.X2), f.X1, f.X2, "[X1, X2]");
  f.inv = {f.X1.apply(f.alpha1) + f.alpha1 * f.alpha2 - f.alpha3,
           f.X2.apply(f.alphabar2) + f.alphabar1 * f.alphabar2 - f.alpha3};
  return f;
}

LaplaceInvariants laplace_invariants(const CharacteristicForm& f) { return f.inv; }

std::pair<LinearOperator, LinearOperator> partial_factorization_residuals(const CharacteristicForm& f) {
  const auto inv = laplace_invariants(f);
  const auto& vars = f.op.vars();
  const LinearOperator first =
      compose(op_of(f.X1, f.alpha2), op_of(f.X2, f.alpha1)) - LinearOperator::scalar(vars, inv.h);
  const LinearOperator second =
      compose(op_of(f.X2, f.alphabar1), op_of(f.X1, f.alphabar2)) - LinearOperator::scalar(vars, inv.k);
  return {f.op - first, f.op - second};
}

CharacteristicForm x1_transform(const CharacteristicForm& f) {
  const Expr h = laplace_invariants(f).h;
  if (expr_is_zero(h))
    throw Error(ErrorKind::Precondition, "h = 0: the operator already factors; X1-transformation undefined");
  const auto& vars = f.op.vars();
  const LinearOperator l1 =
      h * compose(compose(op_of(f.X2, f.alpha1), LinearOperator::scalar(vars, h.inverse())),
                  op_of(f.X1, f.alpha2)) -
      LinearOperator::scalar(vars, h);
  CharacteristicForm out = characteristic_form(l1, f.X1, f.X2);
  if (!expr_is_zero(laplace_invariants(out).k - h))
    throw Error(ErrorKind::Consistency, "k of the X1-transform differs from h");
  return out;
}

CharacteristicForm x2_transform(const CharacteristicForm& f) {
  const Expr k = laplace_invariants(f).k;
  if (expr_is_zero(k))
    throw Error(ErrorKind::Precondition, "k = 0: the operator already factors; X2-transformation undefined");
  const auto& vars = f.op.vars();
  const LinearOperator l1 =
      k * compose(compose(op_of(f.X1, f.alphabar2), LinearOperator::scalar(vars, k.inverse())),
                  op_of(f.X2, f.alphabar1)) -
      LinearOperator::scalar(vars, k);
  CharacteristicForm out = characteristic_form(l1, f.X1, f.X2);
  if (!expr_is_zero(laplace_invariants(out).h - k))
    throw Error(ErrorKind::Consistency, "h of the X2-transform differs from k");
  return out;
}

Expr h1_closed_formula(const CharacteristicForm& f) {
  const auto inv = laplace_invariants(f);
  const Expr lnh = ln(inv.h);
  const Expr x2lnh = f.X2.apply(lnh);
  return Expr(2) * inv.h - inv.k - f.X1.apply(x2lnh) + f.Q * x2lnh + f.X2.apply(f.Q) - f.X1.apply(f.P) +
         Expr(2) * f.P * f.Q;
}

const ChainLink& ChainReport::at(int index) const {
  for (const auto& l : links)
    if (l.index == index) return l;
  throw Error(ErrorKind::Precondition, "no chain link with index " + std::to_string(index));
}

ChainReport run_chain(const LinearOperator& op, int max_steps) {
  ChainReport r;
  r.max_steps = max_steps;
  CharacteristicForm f0 = characteristic_form(op);
  std::vector<ChainLink> forward{{0, f0, laplace_invariants(f0)}};
  std::vector<ChainLink> backward;

  for (int i = 0;; ++i) {
    const ChainLink& cur = forward.back();
    if (expr_is_zero(cur.inv.h)) {
      r.N = i;
      break;
    }
    if (i >= max_steps) break;
    CharacteristicForm next = x1_transform(cur.form);
    forward.push_back({i + 1, next, laplace_invariants(next)});
    ++r.steps_used;
  }
  const ChainLink* cur = &forward.front();
  for (int j = 0;; ++j) {
    if (expr_is_zero(cur->inv.k)) {
      r.K = j;
      break;
    }
    if (j >= max_steps) break;
    CharacteristicForm next = x2_transform(cur->form);
    backward.push_back({-(j + 1), next, laplace_invariants(next)});
    cur = &backward.back();
    ++r.steps_used;
  }
  for (auto it = backward.rbegin(); it != backward.rend(); ++it) r.links.push_back(*it);
  for (auto& l : forward) r.links.push_back(l);
  return r;
}

const char* to_string(VerificationStatus s) {
  switch (s) {
    case VerificationStatus::NotChecked: return "not-checked";
    case VerificationStatus::Verified: return "verified";
    case VerificationStatus::VerifiedOnWitnesses: return "verified-on-witnesses";
    case VerificationStatus::Failed: return "failed";
    case VerificationStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

FirstOrderSolution solve_or_throw(const FirstOrderOperator& w, const Expr& rhs, const std::string& name) {
  FirstOrderOptions opts;
  opts.function_name = name;
  FirstOrderSolution s = solve_first_order_heuristic(w, rhs, opts);
  if (!s.supported)
    throw Error(ErrorKind::Unsupported,
                "unsupported characteristic coordinates for " + w.str() + " (reduced system: " + s.reduced_system + ")");
  return s;
}

// Coefficients of name^(i) in an expression linear in the derivatives of a
// unary function symbol; index = derivative order.
std::vector<Expr> derivative_coefficients(const Expr& u, const std::string& name) {
  std::map<int, Expr> by_order;
  for (const auto& a : u.atoms()) {
    if (a->kind != AtomKind::Function || a->name != name) continue;
    int order = 0;
    for (int d : a->derivative) order += d;
    by_order[order] = by_order.count(order) ? by_order[order] + linear_coefficient(u, a) : linear_coefficient(u, a);
  }
  std::vector<Expr> out;
  if (by_order.empty()) return out;
  out.assign(by_order.rbegin()->first + 1, Expr(0));
  for (auto& [o, c] : by_order) out[o] = c;
  return out;
}

Expr normalize_family(const Expr& u, const std::string& name) {
  const auto c = derivative_coefficients(u, name);
  if (c.empty() || c.back().is_zero()) return u;
  return u / Expr(c.back().num().leading_coefficient());
}

// Pushes a kernel element of L_(from) back to L_(0) along the h-side.
Expr walk_h_side(const ChainReport& r, Expr v, int from) {
  for (int i = from - 1; i >= 0; --i) {
    const ChainLink& l = r.at(i);
    v = (l.form.X1.apply(v) + l.form.alpha2 * v) / l.inv.h;
  }
  return v;
}

// Pushes a kernel element of L_(-from) forward to L_(0) along the k-side.
Expr walk_k_side(const ChainReport& r, Expr w, int from) {
  for (int j = -from + 1; j <= 0; ++j) {
    const ChainLink& l = r.at(j);
    w = (l.form.X2.apply(w) + l.form.alphabar1 * w) / l.inv.k;
  }
  return w;
}

}  // namespace

SolutionCertificate build_solution(const ChainReport& r) {
  if (!r.terminated())
    throw Error(ErrorKind::Precondition, "chain not terminated within " + std::to_string(r.max_steps) + " steps");
  if (r.links.front().form.op.vars().size() != 2)
    throw Error(ErrorKind::Precondition, "closed-form solutions need two independent variables");
  SolutionCertificate cert;
  std::string prov;
  if (r.N && r.K) {
    const ChainLink& hn = r.at(*r.N);
    const auto fs = solve_or_throw(hn.form.X2.with_zeroth(hn.form.alpha1), Expr(0), cert.f_name);
    const Expr uf = normalize_family(walk_h_side(r, fs.general, *r.N), cert.f_name);
    const ChainLink& kk = r.at(-*r.K);
    const auto gs = solve_or_throw(kk.form.X1.with_zeroth(kk.form.alphabar2), Expr(0), cert.g_name);
    const Expr ug = normalize_family(walk_k_side(r, gs.general, *r.K), cert.g_name);
    cert.solution = uf + ug;
    cert.f_coefficients = derivative_coefficients(cert.solution, cert.f_name);
    cert.g_coefficients = derivative_coefficients(cert.solution, cert.g_name);
    prov = "two-sided: F from (X2 + alpha1)v = 0 at link " + std::to_string(*r.N) +
           " pushed back through " + std::to_string(*r.N) + " X1-substitutions; G from (X1 + alphabar2)w = 0 at link " +
           std::to_string(-*r.K) + " pushed forward through " + std::to_string(*r.K) + " X2-substitutions";
  } else if (r.N) {
    const ChainLink& hn = r.at(*r.N);
    const auto ws = solve_or_throw(hn.form.X1.with_zeroth(hn.form.alpha2), Expr(0), cert.g_name);
    const auto vs = solve_or_throw(hn.form.X2.with_zeroth(hn.form.alpha1), ws.general, cert.f_name);
    cert.solution = walk_h_side(r, vs.general, *r.N);
    cert.quadrature_free = is_closed_form(cert.solution);
    cert.f_coefficients = derivative_coefficients(cert.solution, cert.f_name);
    prov = "one-sided (h): triangular system at link " + std::to_string(*r.N) + ", (X1 + alpha2)w = 0, (X2 + alpha1)v = w";
  } else {
    const ChainLink& kk = r.at(-*r.K);
    const auto zs = solve_or_throw(kk.form.X2.with_zeroth(kk.form.alphabar1), Expr(0), cert.f_name);
    const auto ws = solve_or_throw(kk.form.X1.with_zeroth(kk.form.alphabar2), zs.general, cert.g_name);
    cert.solution = walk_k_side(r, ws.general, *r.K);
    cert.quadrature_free = is_closed_form(cert.solution);
    cert.g_coefficients = derivative_coefficients(cert.solution, cert.g_name);
    prov = "one-sided (k): triangular system at link " + std::to_string(-*r.K) +
           ", (X2 + alphabar1)z = 0, (X1 + alphabar2)w = z";
  }
  if (!cert.quadrature_free) {
    // A family inside a quadrature has no derivative expansion.
    if (r.N) cert.g_coefficients.clear();
    if (r.K) cert.f_coefficients.clear();
  }
  cert.provenance = prov + "; X1 = " + r.links.front().form.X1.str() + ", X2 = " + r.links.front().form.X2.str();
  return cert;
}

VerificationReport verify_solution(const LinearOperator& op, const Expr& u, std::uint64_t seed) {
  VerificationReport rep;
  rep.residual = apply(op, u);
  const ZeroTest t = is_zero(rep.residual);
  if (t.status == ZeroStatus::Zero) {
    rep.status = VerificationStatus::Verified;
    rep.detail = "residual is identically zero with symbolic functions";
    return rep;
  }
  std::mt19937_64 rng(seed);
  const auto symbols = function_symbols(u);
  for (int round = 0; round < 3; ++round) {
    std::map<std::string, FunctionWitness> w;
    for (const auto& [name, arity] : symbols) w[name] = random_polynomial_witness(rng, arity, 3);
    Expr inst;
    try {
      inst = apply(op, instantiate_functions(u, w));
    } catch (const Error& e) {
      rep.status = VerificationStatus::Inconclusive;
      rep.detail = std::string("witness instantiation failed: ") + e.what();
      return rep;
    }
    const ZeroTest wt = is_zero(inst);
    if (wt.status == ZeroStatus::NonZero) {
      rep.status = VerificationStatus::Failed;
      std::vector<std::string> vars(op.vars().begin(), op.vars().end());
      rep.witness = wt.witness ? wt.witness : sample_zero(inst, vars).witness;
      rep.detail = "nonzero residual " + rep.residual.str();
      return rep;
    }
    if (wt.status == ZeroStatus::Inconclusive) {
      rep.status = VerificationStatus::Inconclusive;
      rep.detail = "residual could not be decided on polynomial witnesses";
      return rep;
    }
  }
  rep.status = t.status == ZeroStatus::NonZero ? VerificationStatus::Failed : VerificationStatus::VerifiedOnWitnesses;
  rep.detail = t.status == ZeroStatus::NonZero ? "nonzero residual " + rep.residual.str()
                                               : "residual vanishes on polynomial witnesses";
  return rep;
}

VerificationReport verify_solution(const LinearOperator& op, SolutionCertificate& cert, std::uint64_t seed) {
  VerificationReport rep = verify_solution(op, cert.solution, seed);
  cert.status = rep.status;
  return rep;
}

}  // namespace cascade
