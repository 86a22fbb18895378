#include "narrative/linearize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace narrative {

namespace {

void require_perfect(const JointDistribution& p, const CausalDag& dag) {
  if (!is_admissible(dag, p.n())) {
    const auto bad = validate(dag, p.n());
    throw std::domain_error("DAG " + dag.to_string() + " is not admissible: " + bad.front());
  }
  if (!is_perfect(dag))
    throw UnsupportedStructure("chain reduction requires a perfect DAG, got " + dag.to_string());
  if (!p.has_full_support())
    throw std::domain_error("chain reduction requires a full-support distribution");
}

ChainLink make_link(MarginalCache& marginals, VarSet from, VarSet to) {
  const VarSet both = from | to;
  const auto& joint = marginals(both);
  const auto& norm = marginals(from);
  ChainLink link{from, to, {}};
  link.matrix.assign(link.rows() * link.cols(), 0.0);
  const Projector to_from(both, from);
  const Projector to_to(both, to);
  to_from.visit(static_cast<std::uint32_t>(joint.size()), [&](std::uint32_t w, std::uint32_t u) {
    link.matrix[u * link.cols() + to_to(w)] += joint[w] / norm[u];
  });
  return link;
}

}  // namespace

// ---------------------------------------------------------------------------

Belief clique_factor_belief(const JointDistribution& p, const CausalDag& dag) {
  MarginalCache cache(p);
  return clique_factor_belief(cache, dag);
}

Belief clique_factor_belief(MarginalCache& marginals, const CausalDag& dag) {
  const JointDistribution& p = marginals.joint();
  require_perfect(p, dag);
  return clique_factor_belief(marginals, junction_tree(dag));
}

Belief clique_factor_belief(MarginalCache& marginals, const JunctionTree& tree) {
  const JointDistribution& p = marginals.joint();
  if (!marginals.full_support())
    throw std::domain_error("clique factorisation requires a full-support distribution");
  VarSet nodes;
  for (const VarSet c : tree.cliques) nodes = nodes | c;

  Belief b;
  b.nodes = nodes;
  b.mu = p.mu();
  // A chordal graph has at most one maximal clique per node.
  std::array<Factor, 2 * kMaxVariables> factors;
  std::size_t count = 0;
  for (const VarSet c : tree.cliques) factors[count++] = {c, marginals(c).data()};
  std::size_t inverse_size = 0;
  for (const VarSet s : tree.separators) inverse_size += std::size_t{1} << s.size();
  std::vector<double> inverses(inverse_size);
  double* next = inverses.data();
  for (const VarSet s : tree.separators) {
    const auto& m = marginals(s);
    for (std::size_t w = 0; w < m.size(); ++w) next[w] = 1.0 / m[w];
    factors[count++] = {s, next};
    next += m.size();
  }
  b.table = factor_product(nodes, factors.data(), count);
  b.outcome = outcome_conditional(b);
  return b;
}

// ---------------------------------------------------------------------------

ChainPlan plan_chain(const CausalDag& dag) {
  if (!is_perfect(dag))
    throw UnsupportedStructure("chain reduction requires a perfect DAG, got " + dag.to_string());
  ChainPlan plan;
  plan.consequence = dag.nodes().max_var();
  plan.tree = junction_tree(dag);
  const auto& cliques = plan.tree.cliques;
  const int count = static_cast<int>(cliques.size());
  const int y = plan.consequence;

  std::vector<int> path;
  for (int i = 0; i < count; ++i) {
    if (!cliques[i].contains(1)) continue;
    for (int j = 0; j < count; ++j) {
      if (!cliques[j].contains(y)) continue;
      if (i == j) {
        plan.kind = ChainPlan::Kind::same_clique;
        plan.path_cliques = {cliques[i]};
        return plan;
      }
      auto candidate = plan.tree.path(i, j);
      if (!candidate.empty() && (path.empty() || candidate.size() < path.size()))
        path = std::move(candidate);
    }
  }
  if (path.empty()) {
    plan.kind = ChainPlan::Kind::disconnected;
    return plan;
  }

  plan.kind = ChainPlan::Kind::path;
  for (int c : path) plan.path_cliques.push_back(cliques[c]);
  const std::size_t m = plan.path_cliques.size();
  for (std::size_t k = 1; k + 1 < m; ++k)
    if (plan.path_cliques[k].contains(1) || plan.path_cliques[k].contains(y))
      throw std::logic_error("interior path clique holds the action or consequence");

  VarSet covered;
  for (const VarSet c : plan.path_cliques) covered = covered | c;
  for_each_var(covered.without(1).without(y), [&](int v) {
    int hits = 0;
    for (const VarSet c : plan.path_cliques) hits += c.contains(v) ? 1 : 0;
    if (hits == 1) plan.pruned = plan.pruned.with(v);
  });

  // Repeated consecutive separators compose to the identity and are merged.
  for (std::size_t k = 1; k < m; ++k) {
    const VarSet s = plan.path_cliques[k] & plan.path_cliques[k - 1];
    if (plan.separators.empty() || plan.separators.back() != s) plan.separators.push_back(s);
  }
  return plan;
}

ChainReduction reduce_to_chain(const JointDistribution& p, const CausalDag& dag) {
  require_perfect(p, dag);
  MarginalCache cache(p);
  return reduce_to_chain(cache, plan_chain(dag));
}

ChainReduction reduce_to_chain(MarginalCache& marginals, const ChainPlan& plan) {
  return reduce_to_chain(marginals, std::make_shared<const ChainPlan>(plan));
}

ChainReduction reduce_to_chain(MarginalCache& marginals,
                               std::shared_ptr<const ChainPlan> shared) {
  const ChainPlan& plan = *shared;
  ChainReduction r;
  r.shared_plan = std::move(shared);
  r.links.reserve(plan.separators.size() + 1);
  r.z_star.reserve(plan.separators.size());
  const VarSet action = VarSet{}.with(1);
  const VarSet outcome = VarSet{}.with(plan.consequence);

  VarSet support = action | outcome;
  VarSet prev = action;
  for (const VarSet s : plan.separators) {
    r.links.push_back(make_link(marginals, prev, s));
    const auto& m = marginals(s);
    r.z_star.push_back(static_cast<std::uint32_t>(
        std::max_element(m.begin(), m.end()) - m.begin()));
    support = support | s;
    prev = s;
  }
  r.links.push_back(make_link(marginals, prev, outcome));
  r.support = Table{support, marginals(support)};
  return r;
}

OutcomeBelief ChainReduction::chain_outcome() const {
  OutcomeBelief out;
  std::array<double, std::size_t{1} << kMaxVariables> state, next;
  for (int a = 0; a < 2; ++a) {
    state[0] = a == 0 ? 1.0 : 0.0;
    state[1] = a == 1 ? 1.0 : 0.0;
    for (const auto& link : links) {
      const std::size_t cols = link.cols();
      std::fill_n(next.begin(), cols, 0.0);
      for (std::size_t u = 0; u < link.rows(); ++u) {
        if (state[u] == 0.0) continue;
        for (std::size_t v = 0; v < cols; ++v) next[v] += state[u] * link.matrix[u * cols + v];
      }
      std::copy_n(next.begin(), cols, state.begin());
    }
    out.y1_given_a[a] = state[1];
  }
  return out;
}

// ---------------------------------------------------------------------------

Binarization binarize_chain(const ChainReduction& reduction,
                            const std::optional<std::vector<std::uint32_t>>& z_star) {
  const auto& seps = reduction.plan().separators;
  const std::vector<std::uint32_t> star = z_star.value_or(reduction.z_star);
  if (star.size() != seps.size())
    throw std::domain_error("one distinguished value is needed per chain variable");
  for (std::size_t k = 0; k < seps.size(); ++k)
    if (star[k] >= (1u << seps[k].size()))
      throw std::domain_error("distinguished value out of range for " + seps[k].to_string());

  const int n_new = static_cast<int>(seps.size()) + 2;
  const VarSet support = reduction.support.vars;
  const int y = reduction.plan().consequence;
  std::vector<Projector> to_sep;
  for (const VarSet s : seps) to_sep.emplace_back(support, s);

  std::vector<double> table(std::size_t{1} << n_new, 0.0);
  for (std::uint32_t w = 0; w < reduction.support.values.size(); ++w) {
    std::uint32_t x = static_cast<std::uint32_t>(value_of(support, w, 1));
    for (std::size_t k = 0; k < seps.size(); ++k)
      if (to_sep[k](w) == star[k]) x |= 1u << (k + 1);
    x |= static_cast<std::uint32_t>(value_of(support, w, y)) << (n_new - 1);
    table[x] += reduction.support.values[w];
  }
  for (std::size_t k = 0; k < seps.size(); ++k) {
    double mass = 0.0;
    for (std::uint32_t x = 0; x < table.size(); ++x)
      if ((x >> (k + 1)) & 1u) mass += table[x];
    if (!(mass > 0.0))
      throw std::domain_error("distinguished value of " + seps[k].to_string() +
                              " has zero probability");
  }
  if (*std::min_element(table.begin(), table.end()) <= 0.0)
    throw std::domain_error("binarised joint lacks full support for this choice of values");

  auto joint = JointDistribution::from_table(n_new, std::move(table));
  std::vector<Edge> edges;
  for (int i = 1; i < n_new; ++i) edges.emplace_back(i, i + 1);
  CausalDag chain(VarSet::range(1, n_new), std::move(edges));

  const auto target = reduction.chain_outcome();
  const Belief b = factorize(joint, chain);
  const double deviation = std::max(std::abs(b.outcome[0][1] - target.y1_given_a[0]),
                                    std::abs(b.outcome[1][1] - target.y1_given_a[1]));
  return Binarization{std::move(joint), std::move(chain), star, deviation};
}

ZStarSearch search_z_star(const ChainReduction& reduction) {
  const auto& seps = reduction.plan().separators;
  std::size_t combos = 1;
  for (const VarSet s : seps) {
    combos *= std::size_t{1} << s.size();
    if (combos > (std::size_t{1} << 20))
      throw std::domain_error("too many distinguished-value combinations to enumerate");
  }
  ZStarSearch out;
  out.min_deviation = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> star(seps.size(), 0);
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t rest = c;
    for (std::size_t k = 0; k < seps.size(); ++k) {
      const std::size_t arity = std::size_t{1} << seps[k].size();
      star[k] = static_cast<std::uint32_t>(rest % arity);
      rest /= arity;
    }
    try {
      const auto bin = binarize_chain(reduction, star);
      ++out.evaluated;
      if (bin.deviation < out.min_deviation) {
        out.min_deviation = bin.deviation;
        out.best = star;
      }
    } catch (const std::domain_error&) {
      ++out.infeasible;
    }
  }
  return out;
}

}  // namespace narrative
