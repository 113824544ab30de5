// cascade: factor and solve second-order linear PDEs by Laplace and Dini transformations.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cascade/parse.hpp"
#include "cascade/workflow.hpp"

int main(int argc, char** argv) {
  using namespace cascade;
  CLI::App app{"Exact Laplace/Dini cascade engine for second-order linear PDEs"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string vars_text;
  int max_steps = 10;
  int degree_bound = 2;
  std::uint64_t seed = 20061;
  bool as_json = false;
  app.add_option("--vars", vars_text, "Independent variables, comma separated (default x,y or x,y,z)");
  app.add_option("--max-steps", max_steps, "Transformation budget per direction")->check(CLI::NonNegativeNumber);
  app.add_option("--degree-bound", degree_bound, "Polynomial ansatz degree for beta and alpha")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Seed for sampling and witness generation");
  app.add_flag("--json", as_json, "Print the JSON certificate instead of text");

  std::string op_text, second_text, corpus_path;
  const char* one_op[] = {"invariants", "chain", "factor", "solve", "dini"};
  const char* help[] = {"Characteristic form and Laplace invariants h, k",
                        "Laplace chain in both directions with termination indices",
                        "Factor the principal symbol and the operator",
                        "General solution from a terminating Laplace chain, with certificate",
                        "Dini transformations for three-variable operators"};
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(one_op[i], help[i]);
    sub->add_option("operator", op_text, "Operator, e.g. \"Dx*Dy - 2/(x+y)^2\"")->required();
  }
  auto* verify = app.add_subcommand("verify", "Check L u = 0 by substitution");
  verify->add_option("operator", op_text)->required();
  verify->add_option("solution", second_text)->required();
  auto* comp = app.add_subcommand("compose", "Operator product A*B");
  comp->add_option("A", op_text)->required();
  comp->add_option("B", second_text)->required();
  auto* corpus = app.add_subcommand("corpus", "Run a JSONL regression corpus");
  corpus->add_option("path", corpus_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (corpus->parsed()) {
      const CorpusSummary s = run_corpus(corpus_path);
      int failed = 0;
      for (const auto& e : s.entries) {
        std::cout << (e.passed ? "PASS " : "FAIL ") << e.name << "\n";
        if (!e.passed) {
          std::cout << e.diff;
          ++failed;
        }
      }
      std::cout << s.entries.size() - failed << "/" << s.entries.size() << " entries passed\n";
      return failed == 0 ? kExitOk : kExitNegative;
    }
    ProblemSpec spec;
    spec.workflow = app.get_subcommands().front()->get_name();
    spec.inputs.push_back(op_text);
    if (!second_text.empty()) spec.inputs.push_back(second_text);
    if (!vars_text.empty()) spec.vars = parse_variable_list(vars_text);
    spec.max_steps = max_steps;
    spec.degree_bound = degree_bound;
    spec.seed = seed;
    const RunResult r = run(spec);
    if (as_json) std::cout << r.payload.dump(2) << "\n";
    else (r.exit_code == kExitError ? std::cerr : std::cout) << r.text;
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
