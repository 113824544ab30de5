#include <doctest.h>

#include "cascade/parse.hpp"
#include "cascade/workflow.hpp"
#include "support/generators.hpp"

using namespace cascade;
using nlohmann::ordered_json;

namespace {
const std::string kSourceDir = CASCADE_SOURCE_DIR;

RunResult run_one(const std::string& workflow, const std::string& op, const std::string& second = "",
                  int max_steps = 10) {
  ProblemSpec s;
  s.workflow = workflow;
  s.vars = default_variables(op);
  s.inputs = {op};
  if (!second.empty()) s.inputs.push_back(second);
  s.max_steps = max_steps;
  return run(s);
}

ordered_json without_timing(ordered_json j) {
  j.erase("timing_ms");
  return j;
}
}  // namespace

TEST_CASE("parse_operator examples") {
  const LinearOperator model = parse_operator("Dx*Dy + x*Dx*Dz - Dz", {"x", "y", "z"});
  CHECK(model.coefficient({1, 1, 0}) == Expr(1));
  CHECK(model.coefficient({1, 0, 1}) == Expr::variable("x"));
  CHECK(model.coefficient({0, 0, 1}) == Expr(-1));
  CHECK(model.terms().size() == 3);
  const LinearOperator e1 = parse_operator("Dx*Dy - 2/(x+y)^2", {"x", "y"});
  CHECK(e1.coefficient({0, 0}) == parse_expression("-2/(x + y)^2", {"x", "y"}));
  CHECK_THROWS_AS(parse_operator("Dq", {"x", "y"}), Error);
  try {
    parse_operator("Dx*Dy +* 2", {"x", "y"});
    FAIL("no syntax error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("position 7") != std::string::npos);
  }
}

TEST_CASE("default variables") {
  CHECK(default_variables("Dx*Dy - 2/(x+y)^2") == Variables{"x", "y"});
  CHECK(default_variables("Dx*Dy + x*Dx*Dz - Dz") == Variables{"x", "y", "z"});
}

TEST_CASE("run examples") {
  RunResult r = run_one("invariants", "Dx*Dy - 2/(x+y)^2");
  CHECK(r.exit_code == kExitOk);
  CHECK(r.payload["result"]["h"] == "2/(x + y)^2");
  CHECK(r.payload["result"]["k"] == "2/(x + y)^2");

  r = run_one("chain", "Dx*Dy - 1/(x+y)^2");
  CHECK(r.exit_code == kExitNegative);
  CHECK(r.payload["result"]["termination"]["N"] == "budget-exhausted");
  CHECK(r.payload["result"]["termination"]["K"] == "budget-exhausted");
  CHECK(r.payload["exit"] == 2);

  r = run_one("dini", "Dx*Dy + x*Dx*Dz - Dz");
  CHECK(r.exit_code == kExitOk);
  const ordered_json& sol = r.payload["result"]["solution"];
  CHECK(sol["ordering"] == "reversed");
  CHECK(sol["step"] == 1);
  CHECK(sol["verified"] == "verified-on-witnesses");

  r = run_one("invariants", "Dq");
  CHECK(r.exit_code == kExitError);
  CHECK(r.payload["error"]["kind"] == "unknown-variable");
  CHECK_FALSE(r.payload.contains("result"));

  r = run_one("verify", "Dx*Dy - 2/(x+y)^2", "F'(x) + G'(y) - 2*(F(x) + G(y))/(x + y)");
  CHECK(r.exit_code == kExitOk);
  CHECK(r.payload["result"]["status"] == "verified");
  r = run_one("verify", "Dx*Dy - 2/(x+y)^2", "F(x) + G(y)");
  CHECK(r.exit_code == kExitNegative);

  r = run_one("compose", "Dy + x*Dz", "Dx");
  CHECK(r.exit_code == kExitOk);
  CHECK(r.payload["result"]["composition"] == "Dx*Dy + x*Dx*Dz");

  r = run_one("factor", "Dx^2 + Dy^2");
  CHECK(r.exit_code == kExitNegative);
}

TEST_CASE("certificates round-trip through JSON and are deterministic") {
  for (const char* wf : {"solve", "chain", "dini"}) {
    const std::string op = std::string(wf) == "dini" ? "Dx*Dy + x*Dx*Dz - Dz" : "Dx*Dy - 6/(x+y)^2";
    const RunResult a = run_one(wf, op);
    const RunResult b = run_one(wf, op);
    CHECK(a.exit_code == b.exit_code);
    CHECK(without_timing(a.payload).dump() == without_timing(b.payload).dump());
    CHECK(ordered_json::parse(a.payload.dump()) == a.payload);
    for (const char* key : {"workflow", "engine_version", "input", "result", "exit", "timing_ms"})
      CHECK(a.payload.contains(key));
    CHECK(a.payload["engine_version"] == kEngineVersion);
  }
}

TEST_CASE("property: parse(print(L)) = L (200 operators)") {
  std::mt19937_64 rng(505);
  const Variables xy{"x", "y"}, xyz{"x", "y", "z"};
  for (int i = 0; i < 200; ++i) {
    const Variables& v = i % 2 ? xy : xyz;
    LinearOperator op = testing::random_operator(rng, v, 2, 2, 0.5);
    if (i % 3 == 0) op = op + LinearOperator::scalar(v, testing::random_rational_function(rng, v, 1));
    const std::string text = op.str();
    const LinearOperator back = parse_operator(text, v);
    REQUIRE_MESSAGE(back == op, text);
    REQUIRE(back.str() == text);
  }
}

TEST_CASE("bundled corpus passes") {
  const CorpusSummary s = run_corpus(kSourceDir + "/corpus/regression.jsonl");
  CHECK(s.entries.size() >= 15);
  for (const CorpusEntryResult& e : s.entries) CHECK_MESSAGE(e.passed, e.name << ": " << e.diff);
  CHECK(s.all_passed());
  bool found = false;
  for (const CorpusEntryResult& e : s.entries) found |= e.name == "dini-model-solution-verified";
  CHECK(found);
}

TEST_CASE("corrupted expectation is reported with a diff") {
  const CorpusSummary s = run_corpus(kSourceDir + "/tests/data/corrupted_expectation.jsonl");
  REQUIRE(s.entries.size() == 1);
  CHECK_FALSE(s.all_passed());
  CHECK(s.entries[0].diff.find("/termination/N: expected 2, got 3") != std::string::npos);
  CHECK_THROWS_AS(run_corpus(kSourceDir + "/corpus/missing.jsonl"), Error);
}
