#pragma once

// Shared test fixtures: seeded random models and brute-force oracles that
// share no code paths with the library's own algorithms.

#include <algorithm>
#include <array>
#include <functional>
#include <random>
#include <vector>

#include "narrative/belief.hpp"
#include "narrative/dag.hpp"
#include "narrative/prob.hpp"

namespace testing {

using namespace narrative;

inline ConditionalFamily random_family(int n, std::mt19937_64& rng, double floor = 0.02) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  const std::size_t width = std::size_t{1} << (n - 2);
  std::array<std::vector<double>, 4> rows;
  for (auto& row : rows) {
    double total = 0.0;
    for (std::size_t i = 0; i < width; ++i) total += row.emplace_back(u(rng));
    for (auto& v : row) v /= total;
  }
  return ConditionalFamily(n, rows);
}

inline JointDistribution random_joint(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 0.9);
  const double alpha = u(rng);
  const double mu = u(rng);
  return build_joint(alpha, mu, random_family(n, rng));
}

inline int bit(std::uint32_t full, int var) { return static_cast<int>((full >> (var - 1)) & 1u); }

/// Probability that the full-table assignment agrees with `x` on `vars`,
/// summed by scanning every cell of the joint.
inline double event_mass(const JointDistribution& p, VarSet vars, std::uint32_t x_full) {
  double total = 0.0;
  for (std::uint32_t w = 0; w < p.table().size(); ++w) {
    bool ok = true;
    for (int v = 1; v <= p.n() && ok; ++v)
      if (vars.contains(v) && bit(w, v) != bit(x_full, v)) ok = false;
    if (ok) total += p[w];
  }
  return total;
}

/// p_R(y = 1 | a) by summing prod_i p(x_i | x_pa(i)) over all assignments of
/// the DAG's nodes, each conditional recomputed from the full table.
inline std::array<double, 2> brute_outcome(const JointDistribution& p, const CausalDag& dag) {
  const int n = p.n();
  std::array<std::array<double, 2>, 2> ay{};
  const VarSet nodes = dag.nodes();
  for (std::uint32_t x = 0; x < (1u << n); ++x) {
    bool on_nodes = true;  // enumerate assignments over N only: other bits zero
    for (int v = 1; v <= n; ++v)
      if (!nodes.contains(v) && bit(x, v)) on_nodes = false;
    if (!on_nodes) continue;
    double prod = 1.0;
    for (int i = 1; i <= n; ++i) {
      if (!nodes.contains(i)) continue;
      const VarSet pa = dag.parents(i);
      prod *= event_mass(p, pa.with(i), x) / event_mass(p, pa, x);
    }
    ay[bit(x, 1)][bit(x, n)] += prod;
  }
  return {ay[0][1] / (ay[0][0] + ay[0][1]), ay[1][1] / (ay[1][0] + ay[1][1])};
}

/// Every two parents of a common child linked: scan all triples.
inline bool brute_perfect(const CausalDag& dag) {
  const auto ns = dag.nodes().to_vector();
  for (int i : ns)
    for (int j : ns)
      for (int k : ns) {
        if (i >= j || k == i || k == j) continue;
        if (dag.parents(k).contains(i) && dag.parents(k).contains(j) && !dag.linked(i, j))
          return false;
      }
  return true;
}

/// Maximal cliques of the skeleton by checking every node subset.
inline std::vector<VarSet> brute_cliques(const CausalDag& dag) {
  const auto ns = dag.nodes().to_vector();
  std::vector<VarSet> cliques;
  for (std::uint32_t m = 1; m < (1u << ns.size()); ++m) {
    VarSet s;
    for (std::size_t k = 0; k < ns.size(); ++k)
      if ((m >> k) & 1u) s = s.with(ns[k]);
    bool complete = true;
    for (int i : s.to_vector())
      for (int j : s.to_vector())
        if (i < j && !dag.linked(i, j)) complete = false;
    if (complete) cliques.push_back(s);
  }
  std::vector<VarSet> maximal;
  for (VarSet c : cliques) {
    bool dominated = false;
    for (VarSet d : cliques)
      if (d != c && c.subset_of(d)) dominated = true;
    if (!dominated) maximal.push_back(c);
  }
  std::sort(maximal.begin(), maximal.end());
  return maximal;
}

/// d-separation by enumerating every simple skeleton path between A and B
/// and applying the blocking rules node by node.
inline bool brute_d_separated(const CausalDag& dag, VarSet a, VarSet b, VarSet z) {
  std::function<bool(std::vector<int>&)> active_from = [&](std::vector<int>& path) -> bool {
    const int last = path.back();
    if (path.size() > 1 && b.contains(last)) {
      for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        const int v = path[k];
        const bool collider =
            dag.parents(v).contains(path[k - 1]) && dag.parents(v).contains(path[k + 1]);
        if (collider) {
          if (!z.contains(v) && (dag.descendants(v) & z).empty()) return false;
        } else if (z.contains(v)) {
          return false;
        }
      }
      return true;
    }
    for (int next : dag.neighbours(last).to_vector()) {
      if (std::find(path.begin(), path.end(), next) != path.end()) continue;
      path.push_back(next);
      const bool found = active_from(path);
      path.pop_back();
      if (found) return true;
    }
    return false;
  };
  for (int start : a.to_vector()) {
    std::vector<int> path{start};
    if (active_from(path)) return false;
  }
  return true;
}

}  // namespace testing
