#pragma once

// Command back-ends: each turns parsed inputs into a JSON (or CSV) report and
// an exit status. The CLI is a thin argument-parsing layer over these.

#include <string>
#include <vector>

#include <json.hpp>

#include "narrative/equilibrium.hpp"
#include "narrative/scenario.hpp"

namespace narrative {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitConfigError = 2,
  kExitNoEquilibrium = 3,
};

struct CommandResult {
  nlohmann::json report;
  int exit_code = kExitOk;
};

/// Two conditional families that differ only by complementing some middle
/// variables induce the same beliefs under every DAG.
bool relabel_equivalent(const ConditionalFamily& a, const ConditionalFamily& b);

/// "hawk" above d*, "dove" below, "ideal" at d*.
std::string policy_side(double d, double d_star);

/// Solution summary shared by solve, verify and the tests.
nlohmann::json solution_json(const SolveResult& result, const Model& model);

CommandResult run_solve(const ScenarioConfig& config);

/// Solves a built-in scenario and compares against its closed form.
CommandResult run_verify(const std::string& builtin, const BuiltinOverrides& overrides = {});

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  /// "A:B:STEP" with STEP > 0 and A <= B.
  static SweepRange parse(const std::string& text);
  std::vector<double> values() const;
};

struct SweepResult {
  std::string csv;  // param,alpha,d_r,d_l,weight_r,u_star,kind
  int exit_code = kExitOk;
};

/// Rows are solved concurrently and emitted in parameter order.
SweepResult run_sweep(const ScenarioConfig& config, const std::string& param,
                      const SweepRange& range);

CommandResult run_search(ShortDag dag, double alpha, double mu, int target,
                         const NarrativeSearchOptions& options = {});

/// dist is {"n": .., "table": [..]} or {"alpha", "mu", "q": rows, "delta"}.
CommandResult run_linearize(const nlohmann::json& dag_doc, const nlohmann::json& dist_doc);

JointDistribution distribution_from_json(const nlohmann::json& doc);

}  // namespace narrative
