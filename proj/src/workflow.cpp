#include "cascade/workflow.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "cascade/dini.hpp"
#include "cascade/laplace.hpp"
#include "cascade/parse.hpp"

namespace cascade {
namespace {

using json = nlohmann::ordered_json;

json expr_list(const std::vector<Expr>& v) {
  json a = json::array();
  for (const Expr& e : v) a.push_back(e.str());
  return a;
}

json form_json(const CharacteristicForm& f) {
  return json{{"X1", f.X1.str()},         {"X2", f.X2.str()},         {"alpha1", f.alpha1.str()},
              {"alpha2", f.alpha2.str()}, {"alpha3", f.alpha3.str()}, {"alphabar1", f.alphabar1.str()},
              {"alphabar2", f.alphabar2.str()}, {"P", f.P.str()},     {"Q", f.Q.str()}};
}

json termination_json(const ChainReport& r) {
  json t;
  t["N"] = r.N ? json(*r.N) : json("budget-exhausted");
  t["K"] = r.K ? json(*r.K) : json("budget-exhausted");
  return t;
}

json chain_json(const ChainReport& r) {
  json links = json::array();
  for (const ChainLink& l : r.links)
    links.push_back(json{{"index", l.index}, {"operator", l.form.op.str()}, {"h", l.inv.h.str()}, {"k", l.inv.k.str()}});
  return json{{"links", links}, {"termination", termination_json(r)}, {"max_steps", r.max_steps}};
}

json factorization_json(const Factorization& f) {
  return json{{"left", f.left.str()}, {"right", f.right.str()}};
}

json dini_link_json(const DiniLink& l) {
  const DiniFrame& f = l.frame;
  json j{{"step", l.step}, {"ordering", to_string(f.ordering)}, {"status", l.status}};
  if (l.status.rfind("error", 0) == 0) return j;
  j["S1"] = f.S1.str();
  j["S2"] = f.S2.str();
  j["T"] = f.T.str();
  j["a"] = f.a.str();
  j["K"] = f.K.str();
  j["M"] = f.M.str();
  j["N"] = f.N.str();
  j["P"] = f.P.str();
  j["Q"] = f.Q.str();
  j["R"] = f.R.str();
  if (l.transform) {
    const DiniStep& s = *l.transform;
    j["beta"] = s.beta.str();
    j["alpha"] = s.alpha.str();
    j["mu"] = s.mu.str();
    j["nu"] = s.nu.str();
    j["L1"] = s.L1.str();
    // dini_transform rejects any nonzero closure residual.
    j["closure-residual"] = closure_residual(f, s).is_zero() ? "zero" : "nonzero";
  }
  if (l.factorization) j["factorization"] = factorization_json(*l.factorization);
  return j;
}

json certificate_json(const SolutionCertificate& c) {
  json coeffs;
  coeffs[c.f_name] = expr_list(c.f_coefficients);
  coeffs[c.g_name] = expr_list(c.g_coefficients);
  return json{{"solution", c.solution.str()},
              {"coefficients", coeffs},
              {"quadrature_free", c.quadrature_free},
              {"provenance", c.provenance},
              {"verified", to_string(c.status)}};
}

json witness_json(const VerificationReport& v) {
  json j{{"status", to_string(v.status)}, {"detail", v.detail}};
  if (v.witness) {
    json w;
    for (const auto& [k, q] : *v.witness) w[k] = q.get_str();
    j["witness"] = w;
    j["residual"] = v.residual.str();
  }
  return j;
}

const std::string& input(const ProblemSpec& spec, std::size_t i, const char* what) {
  if (spec.inputs.size() <= i) throw Error(ErrorKind::Precondition, std::string("missing ") + what);
  return spec.inputs[i];
}

struct Outcome {
  int exit_code = kExitOk;
  json result;
  std::ostringstream text;
};

void run_invariants(const ProblemSpec& spec, const LinearOperator& op, Outcome& out) {
  const CharacteristicForm f = characteristic_form(op);
  const LaplaceInvariants inv = laplace_invariants(f);
  out.result = form_json(f);
  out.result["h"] = inv.h.str();
  out.result["k"] = inv.k.str();
  out.text << "X1 = " << f.X1.str() << "\nX2 = " << f.X2.str() << "\nh = " << inv.h.str()
           << "\nk = " << inv.k.str() << "\n";
  (void)spec;
}

void run_chain_cmd(const ProblemSpec& spec, const LinearOperator& op, Outcome& out) {
  const ChainReport r = run_chain(op, spec.max_steps);
  out.result = chain_json(r);
  for (const ChainLink& l : r.links)
    out.text << "[" << l.index << "] " << l.form.op.str() << "\n    h = " << l.inv.h.str() << "\n    k = " << l.inv.k.str()
             << "\n";
  out.text << "N = " << (r.N ? std::to_string(*r.N) : "budget-exhausted")
           << ", K = " << (r.K ? std::to_string(*r.K) : "budget-exhausted") << "\n";
  if (!r.terminated()) out.exit_code = kExitNegative;
}

void run_factor(const ProblemSpec&, const LinearOperator& op, Outcome& out) {
  const SymbolFactorization sf = factor_symbol(principal_symbol(op));
  out.result["symbol"] = principal_symbol(op).str();
  out.result["symbol_status"] = to_string(sf.status);
  out.text << "symbol " << principal_symbol(op).str() << ": " << to_string(sf.status) << "\n";
  if (sf.factors) {
    out.result["symbol_factors"] = json::array({sf.factors->first.str(), sf.factors->second.str()});
    out.text << "  = (" << sf.factors->first.str() << ")(" << sf.factors->second.str() << ")\n";
  }
  const auto fac = sf.status == FactorStatus::Factored ? factor_operator(op) : std::nullopt;
  out.result["factorable"] = fac.has_value();
  if (fac) {
    out.result["factorization"] = factorization_json(*fac);
    out.text << "L = (" << fac->left.str() << ")(" << fac->right.str() << ")\n";
  } else {
    out.text << "L is not a product of first-order factors\n";
    out.exit_code = kExitNegative;
  }
}

void run_solve(const ProblemSpec& spec, const LinearOperator& op, Outcome& out) {
  const ChainReport r = run_chain(op, spec.max_steps);
  out.result["chain"] = chain_json(r);
  if (!r.terminated()) {
    out.result["certificate"] = nullptr;
    out.text << "chain budget exhausted after " << r.max_steps << " steps per direction\n";
    out.exit_code = kExitNegative;
    return;
  }
  SolutionCertificate cert = build_solution(r);
  const VerificationReport v = verify_solution(op, cert, spec.seed);
  out.result["certificate"] = certificate_json(cert);
  out.result["verification"] = witness_json(v);
  out.text << "u = " << cert.solution.str() << "\nverification: " << to_string(cert.status) << "\n";
  if (v.status == VerificationStatus::Failed) out.exit_code = kExitError;
  else if (v.status == VerificationStatus::Inconclusive) out.exit_code = kExitNegative;
}

void run_dini(const ProblemSpec& spec, const LinearOperator& op, Outcome& out) {
  const DiniChainReport rep = dini_chain(op, spec.max_steps, spec.degree_bound);
  json chains = json::array();
  for (const DiniChain& c : rep.chains) {
    json links = json::array();
    for (const DiniLink& l : c.links) links.push_back(dini_link_json(l));
    chains.push_back(json{{"ordering", to_string(c.ordering)}, {"factorable", c.factorable()}, {"links", links}});
    out.text << to_string(c.ordering) << ":";
    for (const DiniLink& l : c.links) out.text << " [" << l.step << " " << l.status << "]";
    out.text << "\n";
  }
  out.result["chains"] = chains;
  const auto sol = dini_solution(op, rep, spec.seed);
  if (!sol) {
    out.result["solution"] = nullptr;
    out.text << "no factorable operator within " << spec.max_steps << " steps\n";
    out.exit_code = kExitNegative;
    return;
  }
  json s{{"ordering", to_string(sol->ordering)},
         {"step", sol->link_step},
         {"v", sol->v.str()},
         {"u", sol->u ? json(sol->u->str()) : json(nullptr)},
         {"verified", to_string(sol->status)},
         {"witnesses", sol->witness_log}};
  out.result["solution"] = s;
  out.text << "v = " << sol->v.str() << "\n";
  if (sol->u) out.text << "u = " << sol->u->str() << "\n";
  for (const std::string& w : sol->witness_log) out.text << "  " << w << "\n";
  out.text << "verification: " << to_string(sol->status) << "\n";
  if (sol->status == VerificationStatus::Failed) out.exit_code = kExitError;
  else if (sol->status != VerificationStatus::Verified && sol->status != VerificationStatus::VerifiedOnWitnesses)
    out.exit_code = kExitNegative;
}

void run_verify(const ProblemSpec& spec, const LinearOperator& op, Outcome& out) {
  const Expr u = parse_expression(input(spec, 1, "solution"), spec.vars);
  const VerificationReport v = verify_solution(op, u, spec.seed);
  out.result = witness_json(v);
  out.result["solution"] = u.str();
  out.text << "L u = " << v.residual.str() << "\nverification: " << to_string(v.status) << "\n";
  if (v.witness) {
    out.text << "witness:";
    for (const auto& [k, q] : *v.witness) out.text << " " << k << "=" << q.get_str();
    out.text << "\n";
  }
  if (v.status != VerificationStatus::Verified && v.status != VerificationStatus::VerifiedOnWitnesses)
    out.exit_code = kExitNegative;
}

void run_compose(const ProblemSpec& spec, const LinearOperator& op, Outcome& out) {
  const LinearOperator b = parse_operator(input(spec, 1, "second operator"), spec.vars);
  const LinearOperator c = compose(op, b);
  out.result["composition"] = c.str();
  out.text << c.str() << "\n";
}

}  // namespace

Variables default_variables(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != 'z') continue;
    const bool left = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == 'D';
    const bool right = i + 1 == text.size() || !std::isalnum(static_cast<unsigned char>(text[i + 1]));
    if (left && right) return {"x", "y", "z"};
  }
  return {"x", "y"};
}

RunResult run(const ProblemSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  json payload{{"workflow", spec.workflow}, {"engine_version", kEngineVersion}};
  try {
    const std::string& text = input(spec, 0, "operator");
    const Variables vars = spec.vars.empty() ? default_variables(text) : spec.vars;
    ProblemSpec s = spec;
    s.vars = vars;
    json vars_json = json::array();
    for (const auto& v : vars) vars_json.push_back(v);
    payload["input"] = json{{"operator", text}, {"vars", vars_json}};
    const LinearOperator op = parse_operator(text, vars);
    payload["input"]["parsed"] = op.str();
    if (spec.workflow == "invariants") run_invariants(s, op, out);
    else if (spec.workflow == "chain") run_chain_cmd(s, op, out);
    else if (spec.workflow == "factor") run_factor(s, op, out);
    else if (spec.workflow == "solve") run_solve(s, op, out);
    else if (spec.workflow == "dini") run_dini(s, op, out);
    else if (spec.workflow == "verify") run_verify(s, op, out);
    else if (spec.workflow == "compose") run_compose(s, op, out);
    else throw Error(ErrorKind::Precondition, "unknown workflow '" + spec.workflow + "'");
    payload["result"] = out.result;
  } catch (const Error& e) {
    out.exit_code = kExitError;
    payload["error"] = json{{"kind", to_string(e.kind())}, {"message", e.what()}};
    out.text << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
  } catch (const std::exception& e) {
    out.exit_code = kExitError;
    payload["error"] = json{{"kind", "internal"}, {"message", e.what()}};
    out.text << "error: " << e.what() << "\n";
  }
  payload["exit"] = out.exit_code;
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  payload["timing_ms"] = ms;
  return RunResult{out.exit_code, std::move(payload), out.text.str()};
}

bool CorpusSummary::all_passed() const {
  for (const auto& e : entries)
    if (!e.passed) return false;
  return true;
}

bool json_subset(const json& expected, const json& actual, const std::string& path, std::string& diff) {
  if (expected.is_object()) {
    if (!actual.is_object()) {
      diff += path + ": expected object, got " + actual.dump() + "\n";
      return false;
    }
    bool ok = true;
    for (const auto& [key, value] : expected.items()) {
      if (!actual.contains(key)) {
        diff += path + "/" + key + ": missing (expected " + value.dump() + ")\n";
        ok = false;
        continue;
      }
      ok = json_subset(value, actual.at(key), path + "/" + key, diff) && ok;
    }
    return ok;
  }
  if (expected != actual) {
    diff += path + ": expected " + expected.dump() + ", got " + actual.dump() + "\n";
    return false;
  }
  return true;
}

CorpusSummary run_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Precondition, "cannot read corpus '" + path + "'");
  CorpusSummary summary;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::Precondition, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    ProblemSpec spec;
    spec.workflow = entry.value("command", "");
    spec.inputs.push_back(entry.value("operator", ""));
    if (entry.contains("solution")) spec.inputs.push_back(entry["solution"].get<std::string>());
    if (entry.contains("second")) spec.inputs.push_back(entry["second"].get<std::string>());
    if (entry.contains("vars")) spec.vars = parse_variable_list(entry["vars"].get<std::string>());
    spec.max_steps = entry.value("max_steps", spec.max_steps);
    spec.degree_bound = entry.value("degree_bound", spec.degree_bound);
    spec.seed = entry.value("seed", spec.seed);

    CorpusEntryResult r;
    r.name = entry.value("name", "line " + std::to_string(lineno));
    const RunResult res = run(spec);
    json actual = res.payload.contains("result") ? res.payload["result"] : json::object();
    actual["exit"] = res.exit_code;
    if (res.payload.contains("error")) actual["error"] = res.payload["error"];
    r.passed = json_subset(entry.value("expect", json::object()), actual, "", r.diff);
    summary.entries.push_back(std::move(r));
  }
  return summary;
}

}  // namespace cascade
