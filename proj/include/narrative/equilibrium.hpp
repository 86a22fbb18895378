#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "narrative/belief.hpp"
#include "narrative/dag.hpp"
#include "narrative/prob.hpp"

namespace narrative {

struct SolverOptions {
  int scan_points = 1024;     // alpha grid over [epsilon, 1 - epsilon]
  double tie_tol = 1e-9;      // argmax membership
  double root_tol = 1e-13;    // bisection stops below this bracket width
  int max_bisections = 200;
  bool parallel = true;       // OpenMP kernel for narrative evaluation

  bool operator==(const SolverOptions&) const = default;
};

/// A fully specified model instance: every (family, DAG) pair is a feasible
/// narrative. Families must already have full support.
struct Model {
  int n = 3;
  double mu = 0.5;
  double d_star = 0.5;
  double epsilon = 1e-3;
  CostFunction cost = CostFunction::quadratic(1.0);
  std::vector<ConditionalFamily> families;
  std::vector<std::string> family_labels;
  std::vector<CausalDag> dags;
  std::vector<std::string> dag_labels;
  SolverOptions solver;

  std::size_t narrative_count() const { return families.size() * dags.size(); }
  std::size_t family_of(std::size_t narrative) const { return narrative / dags.size(); }
  std::size_t dag_of(std::size_t narrative) const { return narrative % dags.size(); }
  std::string describe(std::size_t narrative) const;

  /// Throws std::domain_error on empty sets, bad parameters or inadmissible DAGs.
  void check() const;
};

struct PolicyChoice {
  double d = 0.0;
  double value = 0.0;  // net anticipatory utility at d
};

/// Unique maximiser of U(d) = V(d) - C(d - d*) over [lo, hi]. Quadratic costs
/// use the closed form clamp(d* + slope / 2k); other costs bisect on U'.
PolicyChoice best_policy(const OutcomeBelief& belief, const CostFunction& cost, double d_star,
                         double lo, double hi);

/// Per-narrative evaluation at a given alpha.
struct NarrativeEval {
  OutcomeBelief belief;
  PolicyChoice best;   // over [epsilon, 1 - epsilon]
  PolicyChoice right;  // over [alpha, 1 - epsilon]
  PolicyChoice left;   // over [epsilon, alpha]
};

enum class Execution { serial, parallel };

/// Evaluates every narrative of the model at alpha. The parallel kernel
/// shares subset marginals across the DAGs of one family and distributes
/// families over OpenMP threads; the serial path recomputes each narrative
/// from scratch and is the reference the parallel one is tested against.
std::vector<NarrativeEval> evaluate_narratives(double alpha, const Model& model,
                                               Execution exec = Execution::parallel);

NarrativeEval evaluate_narrative(double alpha, const Model& model, std::size_t narrative);

struct Maximizer {
  std::size_t narrative;
  double d;
  double value;
};

struct BestResponse {
  double alpha = 0.0;
  double value = 0.0;                  // U*
  std::vector<Maximizer> maximizers;   // within tie tolerance of U*
  double right_value = 0.0;            // U_r(alpha): best over d >= alpha
  double left_value = 0.0;             // U_l(alpha): best over d <= alpha
  std::vector<Maximizer> right;        // ties for U_r
  std::vector<Maximizer> left;         // ties for U_l
  std::vector<NarrativeEval> evals;
};

BestResponse best_response(double alpha, const Model& model,
                           Execution exec = Execution::parallel);

struct SupportEntry {
  std::size_t narrative;
  double d;
  double weight;
};

struct EquilibriumSolution {
  enum class Kind { pure, mixed, rational_expectations };

  double alpha = 0.0;
  std::vector<SupportEntry> support;
  double u_star = 0.0;
  Kind kind = Kind::pure;
};

std::string to_string(EquilibriumSolution::Kind kind);

struct SolveResult {
  std::optional<EquilibriumSolution> solution;
  std::vector<double> pure_points;   // self-consistent pure alphas, ascending
  std::vector<double> mixed_roots;   // roots of U_r - U_l, ascending
  std::vector<std::array<double, 2>> g_table;  // (alpha, U_r - U_l) scan
  std::string diagnostic;            // set when no equilibrium was found
};

/// Searches for (alpha, sigma): rational-expectations point, then pure
/// self-consistent policies, then mixed roots of U_r(alpha) - U_l(alpha).
/// The first candidate in that order (smallest alpha within a class) is
/// returned; all candidates are listed.
SolveResult solve(const Model& model);

struct ConsistencyReport {
  double max_gap = 0.0;            // U* - U(s, d | alpha) over the support
  double consistency_residual = 0.0;  // |alpha - sum sigma d|
  double weight_sum_error = 0.0;
  bool weights_valid = true;       // positive and policies inside D
  std::vector<double> gaps;        // per support entry
  bool ok = false;
};

/// Re-verifies both equilibrium conditions from scratch (serial evaluation).
ConsistencyReport consistency_check(const EquilibriumSolution& solution, const Model& model,
                                    double gap_tol = 1e-8, double residual_tol = 1e-9);

// ---------------------------------------------------------------------------
// Three-variable narrative bounds.

enum class ShortDag { lever, collider };

/// a -> x_2 -> y or a -> y <- x_2 on {1,2,3}.
CausalDag short_dag(ShortDag kind);

/// p_ay = p(x_2 = 1 | a, y) ordered (p00, p01, p10, p11).
using X2Pattern = std::array<double, 4>;

struct NarrativeSearchOptions {
  double delta = 1e-6;  // corners use entries delta and 1 - delta
  double grid = 0.05;   // local refinement step
};

struct NarrativeSearchResult {
  X2Pattern best{};          // argmax (after refinement)
  double value = 0.0;
  X2Pattern best_corner{};
  double corner_value = 0.0;
  std::vector<std::pair<X2Pattern, double>> corners;  // all 16, enumeration order
};

/// p_R(y = 1 | a = target) for a three-variable narrative with the given pattern.
double short_narrative_belief(ShortDag dag, const X2Pattern& pattern, double alpha, double mu,
                              int target);

/// Maximises p_R(y = 1 | a = target) over p_ay by corner enumeration and local
/// grid refinement.
NarrativeSearchResult optimal_narrative_search(ShortDag dag, double alpha, double mu, int target,
                                               const NarrativeSearchOptions& options = {});

/// mu / (mu + alpha (1 - mu)): best lever belief p_R(y=1|a=1).
double lever_bound(double alpha, double mu);
/// 1 - alpha (1 - mu): best opportunity belief p_R(y=1|a=1).
double opportunity_bound(double alpha, double mu);

}  // namespace narrative
