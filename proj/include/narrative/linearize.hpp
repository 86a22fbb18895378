#pragma once

// Reduction of perfect-DAG beliefs to single causal chains.
//
// For a perfect DAG the belief factorises over a junction tree of its
// maximal cliques. Walking the tree path from a clique holding the action to
// a clique holding the consequence, the separators along that path form a
// chain a -> z_2 -> ... -> z_m -> y whose composed conditionals reproduce
// p_R(y | a) exactly. Each z_k may be multi-valued; binarize_chain then
// replaces it by the indicator 1{z_k = z*_k}.

#include <memory>
#include <optional>
#include <vector>

#include "narrative/belief.hpp"
#include "narrative/dag.hpp"
#include "narrative/prob.hpp"

namespace narrative {

/// prod_C p(x_C) / prod_S p(x_S) over a junction tree. Must agree with
/// factorize() on perfect DAGs.
Belief clique_factor_belief(const JointDistribution& p, const CausalDag& dag);
Belief clique_factor_belief(MarginalCache& marginals, const CausalDag& dag);
/// Same, over a junction tree already built for the DAG.
Belief clique_factor_belief(MarginalCache& marginals, const JunctionTree& tree);

/// Structural part of a chain reduction; depends only on the DAG.
struct ChainPlan {
  enum class Kind {
    same_clique,   // action and consequence share a clique
    disconnected,  // no tree path: a and y independent under p_R
    path,
  };

  Kind kind = Kind::path;
  int consequence = 0;
  JunctionTree tree;
  std::vector<VarSet> path_cliques;  // C_1 .. C_m
  std::vector<VarSet> separators;    // chain variables z_2 .. in order
  VarSet pruned;                     // intermediates lying in exactly one path clique

  /// Nodes of the reduced linear DAG (action, separators, consequence).
  int chain_nodes() const { return static_cast<int>(separators.size()) + 2; }
};

/// Throws UnsupportedStructure for imperfect DAGs.
ChainPlan plan_chain(const CausalDag& dag);

/// One transition p(to | from) of the chain; inconsistent assignments on
/// overlapping variables carry probability zero.
struct ChainLink {
  VarSet from;
  VarSet to;
  std::vector<double> matrix;  // [from_value * 2^|to| + to_value]

  std::size_t rows() const { return std::size_t{1} << from.size(); }
  std::size_t cols() const { return std::size_t{1} << to.size(); }
};

struct ChainReduction {
  std::shared_ptr<const ChainPlan> shared_plan;
  std::vector<ChainLink> links;        // a -> z_2, z_2 -> z_3, ..., z_m -> y
  std::vector<std::uint32_t> z_star;   // per separator: default distinguished value
  Table support;                       // p over action, separators and consequence

  const ChainPlan& plan() const { return *shared_plan; }
  /// Sum over z of p(z_2|a) prod p(z_{k+1}|z_k) p(y|z_m).
  OutcomeBelief chain_outcome() const;
};

ChainReduction reduce_to_chain(const JointDistribution& p, const CausalDag& dag);
ChainReduction reduce_to_chain(MarginalCache& marginals, const ChainPlan& plan);
/// Shares the plan instead of copying it.
ChainReduction reduce_to_chain(MarginalCache& marginals,
                               std::shared_ptr<const ChainPlan> plan);

struct Binarization {
  JointDistribution joint;             // over (a, 1{z_2=z*_2}, ..., y)
  CausalDag dag;                       // 1 -> 2 -> ... -> joint.n()
  std::vector<std::uint32_t> z_star;
  double deviation;                    // max_a |p'_{R'}(y=1|a) - p_R(y=1|a)|
};

/// Binarises every separator at z_star (defaults to reduction.z_star).
/// Throws std::domain_error when the induced joint lacks full support.
Binarization binarize_chain(const ChainReduction& reduction,
                            const std::optional<std::vector<std::uint32_t>>& z_star = {});

struct ZStarSearch {
  std::vector<std::uint32_t> best;
  double min_deviation = 0.0;
  std::size_t evaluated = 0;
  std::size_t infeasible = 0;  // choices whose binarised joint lacks full support
};

/// Tries every combination of distinguished values.
ZStarSearch search_z_star(const ChainReduction& reduction);

}  // namespace narrative
