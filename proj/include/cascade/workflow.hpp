// Command workflows behind the command-line tool, with JSON certificates.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascade/lpdo.hpp"

namespace cascade {

inline constexpr const char* kEngineVersion = "cascade 1.0.0";

/// Exit codes: 0 success, 2 valid negative outcome, 1 error.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitNegative = 2 };

struct ProblemSpec {
  std::string workflow;  // invariants | chain | factor | solve | dini | verify | compose
  Variables vars;
  std::vector<std::string> inputs;  // operator text, then second operand / solution text
  int max_steps = 10;
  int degree_bound = 2;
  std::uint64_t seed = 20061;
};

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::ordered_json payload;  // certificate
  std::string text;                // human-readable report
};

/// Never throws; errors become exit code 1 with an "error" payload.
RunResult run(const ProblemSpec& spec);

/// Variables used when none are given: x,y,z if the text mentions Dz or z, else x,y.
Variables default_variables(const std::string& operator_text);

struct CorpusEntryResult {
  std::string name;
  bool passed = false;
  std::string diff;  // expected vs actual on mismatch
};

struct CorpusSummary {
  std::vector<CorpusEntryResult> entries;
  bool all_passed() const;
};

/// One JSON object per line: {"name", "command", "operator", "vars"?, "solution"?,
/// "second"?, "max_steps"?, "degree_bound"?, "seed"?, "expect": {...}}. The
/// expectation matches when each of its fields equals the corresponding field
/// of {"exit": code, ...payload} (objects compared recursively as subsets).
/// Throws Error(Precondition) if the file cannot be read or a line is not JSON.
CorpusSummary run_corpus(const std::string& path);

/// Subset comparison used by the corpus runner; appends differences to diff.
bool json_subset(const nlohmann::ordered_json& expected, const nlohmann::ordered_json& actual,
                 const std::string& path, std::string& diff);

}  // namespace cascade
