#pragma once

#include <array>
#include <vector>

#include "narrative/dag.hpp"
#include "narrative/prob.hpp"

namespace narrative {

/// Tolerance for classifying a belief as rational expectations.
inline constexpr double kRationalTolerance = 1e-9;

/// Symmetric convex deviation cost with C(0) = C'(0) = 0.
class CostFunction {
 public:
  enum class Kind { quadratic, power };

  /// k * delta^2
  static CostFunction quadratic(double k);
  /// k * |delta|^exponent, exponent > 1
  static CostFunction power(double k, double exponent);

  Kind kind() const { return kind_; }
  double k() const { return k_; }
  double exponent() const { return exponent_; }

  double operator()(double delta) const;
  double derivative(double delta) const;

  bool operator==(const CostFunction&) const = default;

 private:
  CostFunction(Kind kind, double k, double exponent) : kind_(kind), k_(k), exponent_(exponent) {}
  Kind kind_;
  double k_;
  double exponent_;
};

/// p_R(y = 1 | a) for a = 0, 1.
struct OutcomeBelief {
  std::array<double, 2> y1_given_a{};

  double slope() const { return y1_given_a[1] - y1_given_a[0]; }
};

/// Subjective distribution induced by a narrative.
struct Belief {
  VarSet nodes;
  std::vector<double> table;  // over X_N, lowest node in the least significant bit
  std::array<std::array<double, 2>, 2> outcome{};  // outcome[a][y] = p_R(y | a)
  double mu = 0.0;  // objective p(y = 1)

  OutcomeBelief outcome_belief() const { return {{outcome[0][1], outcome[1][1]}}; }
};

/// p_R(x_N) = prod_i p(x_i | x_{R(i)}).
Belief factorize(const JointDistribution& p, const CausalDag& dag);
Belief factorize(MarginalCache& marginals, const CausalDag& dag);

/// p_R(y | a) by marginalisation and division of the factorised joint.
std::array<std::array<double, 2>, 2> outcome_conditional(const Belief& belief);

/// Sum over the non-action nodes of prod_{i != 1} p(x_i | x_{R(i)}); only
/// valid when node 1 is ancestral. Independent route for cross-checks.
OutcomeBelief outcome_conditional_ancestral(const JointDistribution& p, const CausalDag& dag);

/// V = d p_R(y=1|a=1) + (1-d) p_R(y=1|a=0).
double gross_utility(const OutcomeBelief& belief, double d);
double gross_utility(const Belief& belief, double d);

/// U = V - C(d - d*).
double net_utility(const OutcomeBelief& belief, double d, const CostFunction& cost, double d_star);
double net_utility(const Belief& belief, double d, const CostFunction& cost, double d_star);

/// |V((p,R), alpha | alpha) - mu| with alpha = p(a = 1).
double nsqd_deviation(const JointDistribution& p, const CausalDag& dag);

/// max_i |p_R(x_i = 1) - p(x_i = 1)| over the DAG's nodes.
double marginal_distortion(const JointDistribution& p, const CausalDag& dag);

bool is_rational_expectations(const Belief& belief, double tol = kRationalTolerance);

/// x_A ⊥ x_B | x_Z as asserted by a DAG.
struct Independence {
  VarSet a;
  VarSet b;
  VarSet given;

  bool operator==(const Independence&) const = default;
};

struct CiViolation {
  Independence statement;
  double deviation;  // max |p(a,b,z) - p(a,z) p(b,z) / p(z)|
};

/// Local Markov statements of the DAG: each node is independent of its
/// non-descendant non-parents given its parents. Symmetric duplicates are
/// merged; every statement is confirmed by d_separated.
std::vector<Independence> independence_statements(const CausalDag& dag);

double independence_deviation(const JointDistribution& p, const Independence& s);

/// Statements of the DAG that p violates by more than `tol`.
std::vector<CiViolation> ci_violations(const JointDistribution& p, const CausalDag& dag, double tol);

}  // namespace narrative
