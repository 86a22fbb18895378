#pragma once

#include <array>
#include <compare>
#include <string>
#include <utility>
#include <vector>

#include "narrative/errors.hpp"
#include "narrative/varset.hpp"

namespace narrative {

using Edge = std::pair<int, int>;  // (from, to)

/// A causal model: node subset N of {1..n} with directed links among them.
/// Construction checks only that edges reference member nodes; acyclicity
/// and the action/consequence restrictions are reported by validate().
class CausalDag {
 public:
  CausalDag() = default;
  CausalDag(const std::vector<int>& nodes, std::vector<Edge> edges);
  CausalDag(VarSet nodes, std::vector<Edge> edges);

  VarSet nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  VarSet parents(int node) const { return parents_[node]; }
  VarSet children(int node) const { return children_[node]; }
  VarSet neighbours(int node) const { return parents_[node] | children_[node]; }
  bool linked(int i, int j) const { return neighbours(i).contains(j); }

  VarSet ancestors(int node) const;
  VarSet descendants(int node) const;
  bool has_path(int from, int to) const { return descendants(from).contains(to); }
  bool is_acyclic() const;

  /// "{1,2,3}: 1->2, 2->3"
  std::string to_string() const;

  /// Canonical order: node list, then edge list, both lexicographic.
  std::strong_ordering operator<=>(const CausalDag& other) const;
  bool operator==(const CausalDag& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  VarSet nodes_;
  std::vector<Edge> edges_;
  std::array<VarSet, kMaxVariables + 1> parents_{};
  std::array<VarSet, kMaxVariables + 1> children_{};
};

/// Lists every violated restriction; empty means the DAG is admissible for
/// an n-variable model.
std::vector<std::string> validate(const CausalDag& dag, int n);
/// validate(dag, n).empty(), without building messages.
bool is_admissible(const CausalDag& dag, int n);

/// Every two parents of a common child are linked.
bool is_perfect(const CausalDag& dag);

/// Single chain: 1 is the only ancestral node, the largest node the only
/// terminal node, and every other node has exactly one parent.
bool is_linear(const CausalDag& dag);

struct EnumerationOptions {
  int max_nodes = 3;
  bool perfect_only = false;
  bool action_ancestral = false;

  bool operator==(const EnumerationOptions&) const = default;
};

/// All admissible DAGs over node sets {1,n} ∪ S with S ⊆ {2..n-1} and at most
/// max_nodes nodes, in canonical order.
std::vector<CausalDag> enumerate_dags(int n, const EnumerationOptions& options);

/// Dense DAG over `nodes` with every link oriented low -> high.
CausalDag fully_connected(VarSet nodes);

/// Maximal sets of pairwise-linked nodes, canonical order. Throws
/// UnsupportedStructure for imperfect DAGs.
std::vector<VarSet> maximal_cliques(const CausalDag& dag);

struct JunctionTree {
  std::vector<VarSet> cliques;
  std::vector<std::pair<int, int>> tree_edges;  // clique indices, first < second
  std::vector<VarSet> separators;               // parallel to tree_edges

  /// Clique indices along the unique tree path, inclusive; empty when the
  /// cliques lie in different components.
  std::vector<int> path(int from, int to) const;
};

/// Maximum-weight spanning forest of the clique graph (weight |C ∩ C'|),
/// verified before it is returned.
JunctionTree junction_tree(const CausalDag& dag);

/// Forest and running-intersection checks; empty when the tree is valid.
std::vector<std::string> junction_tree_violations(const JunctionTree& tree);

/// d-separation of `a` and `b` given `z` (moralised ancestral graph test).
bool d_separated(const CausalDag& dag, VarSet a, VarSet b, VarSet z);

}  // namespace narrative
