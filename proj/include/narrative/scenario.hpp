#pragma once

// Scenario files: one JSON document describing a model instance.
//
//   {
//     "schema_version": 1, "name": "...", "builtin": "",
//     "n": 3, "mu": 0.5, "d_star": 0.5, "epsilon": 1e-3, "delta": 1e-6,
//     "cost": {"kind": "quadratic", "k": 1.0},
//     "q_set": [{"label": "...", "rows": [[...], [...], [...], [...]]}]
//              or {"generator": "corners" | "grid:0.25", "families": [...],
//                  "mirror_closure": true},
//     "dag_set": [{"nodes": [1,2,3], "edges": [[1,2],[2,3]]}, ...]
//                or {"enumerate": {"max_nodes": 3, "perfect_only": false,
//                                  "action_ancestral": true},
//                    "dags": [...], "exclude": [...]},
//     "solver": {"scan_points": 1024, "tie_tol": 1e-9, ...}
//   }
//
// Families are listed unperturbed; build_model mixes each with the uniform
// distribution at weight delta.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "narrative/dag.hpp"
#include "narrative/equilibrium.hpp"
#include "narrative/errors.hpp"

namespace narrative {

inline constexpr int kSchemaVersion = 1;

struct CostSpec {
  std::string kind = "quadratic";  // or "power"
  double k = 1.0;
  double exponent = 2.0;           // power kind only

  CostFunction make() const;
  bool operator==(const CostSpec&) const = default;
};

struct FamilySpec {
  std::string label;
  std::array<std::vector<double>, 4> rows;

  bool operator==(const FamilySpec&) const = default;
};

struct QSetSpec {
  std::vector<FamilySpec> families;
  std::string generator;        // "", "corners" or "grid:<h>"
  bool mirror_closure = false;

  bool operator==(const QSetSpec&) const = default;
};

struct DagEntry {
  std::string label;
  CausalDag dag;

  bool operator==(const DagEntry&) const = default;
};

struct DagSetSpec {
  std::vector<DagEntry> dags;
  std::optional<EnumerationOptions> enumerate;
  std::vector<CausalDag> exclude;

  bool operator==(const DagSetSpec&) const = default;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string builtin;  // set only for the shipped paper scenarios
  int n = 3;
  double mu = 0.5;
  double d_star = 0.5;
  double epsilon = 1e-3;
  double delta = 1e-6;
  CostSpec cost;
  QSetSpec q_set;
  DagSetSpec dag_set;
  SolverOptions solver;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ConfigError naming the first offending field.
void validate(const ScenarioConfig& config);

ScenarioConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ScenarioConfig& config);

/// Pretty-printed, key-sorted; load(emit(c)) == c.
std::string emit_scenario(const ScenarioConfig& config);
ScenarioConfig parse_scenario(const std::string& text);

/// A file path, or the name of a built-in scenario.
ScenarioConfig load_scenario(const std::string& path_or_builtin);

CausalDag dag_from_json(const nlohmann::json& doc, const std::string& field = "dag");
nlohmann::json dag_to_json(const CausalDag& dag);

// ---------------------------------------------------------------------------
// Built-in scenarios.

struct BuiltinOverrides {
  std::optional<double> k;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> d_star;
};

const std::vector<std::string>& builtin_names();
bool is_builtin(const std::string& name);

/// Throws ConfigError listing the known names for an unknown one.
ScenarioConfig builtin_scenario(const std::string& name, const BuiltinOverrides& overrides = {});

// ---------------------------------------------------------------------------

/// Explicit families, then generated ones, then mirror images of any family
/// whose mirror is not yet present. Unperturbed.
std::vector<FamilySpec> expand_families(const ScenarioConfig& config);

/// DAGs from the explicit list and the enumeration, minus exclusions, in
/// canonical order without duplicates.
std::vector<DagEntry> expand_dags(const ScenarioConfig& config);

Model build_model(const ScenarioConfig& config);

/// "cost.k", "mu", "d_star", "epsilon", "delta" or "cost.exponent".
void set_parameter(ScenarioConfig& config, const std::string& name, double value);

}  // namespace narrative
