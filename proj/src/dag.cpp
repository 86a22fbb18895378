#include "narrative/dag.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace narrative {

namespace {

VarSet closure(VarSet start, const std::array<VarSet, kMaxVariables + 1>& step) {
  VarSet seen = start;
  VarSet frontier = start;
  while (!frontier.empty()) {
    VarSet next;
    for_each_var(frontier, [&](int v) { next = next | step[v]; });
    frontier = next - seen;
    seen = seen | next;
  }
  return seen;
}

// Kahn's algorithm over masks.
bool acyclic(VarSet nodes, const std::array<VarSet, kMaxVariables + 1>& parents) {
  VarSet remaining = nodes;
  while (!remaining.empty()) {
    VarSet sources;
    for_each_var(remaining, [&](int v) {
      if ((parents[v] & remaining).empty()) sources = sources.with(v);
    });
    if (sources.empty()) return false;
    remaining = remaining - sources;
  }
  return true;
}

bool perfect(VarSet nodes, const std::array<VarSet, kMaxVariables + 1>& parents,
             const std::array<VarSet, kMaxVariables + 1>& neighbours) {
  bool ok = true;
  for_each_var(nodes, [&](int k) {
    const VarSet pa = parents[k];
    for_each_var(pa, [&](int i) {
      if (!pa.without(i).subset_of(neighbours[i])) ok = false;
    });
  });
  return ok;
}

// Lexicographic on the ascending member lists.
std::strong_ordering member_order(VarSet x, VarSet y) {
  std::uint32_t a = x.mask(), b = y.mask();
  for (; a != 0 && b != 0; a &= a - 1, b &= b - 1)
    if (auto c = std::countr_zero(a) <=> std::countr_zero(b); c != 0) return c;
  return (a != 0) <=> (b != 0);
}

}  // namespace

CausalDag::CausalDag(const std::vector<int>& nodes, std::vector<Edge> edges)
    : CausalDag(VarSet::from_vector(nodes), std::move(edges)) {}

CausalDag::CausalDag(VarSet nodes, std::vector<Edge> edges)
    : nodes_(nodes), edges_(std::move(edges)) {
  if (nodes_.max_var() > kMaxVariables) throw std::domain_error("DAG node out of range");
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::domain_error("DAG has a repeated edge");
  for (const auto& [from, to] : edges_) {
    if (!nodes_.contains(from) || !nodes_.contains(to))
      throw std::domain_error("edge " + std::to_string(from) + "->" + std::to_string(to) +
                              " references a node outside " + nodes_.to_string());
    parents_[to] = parents_[to].with(from);
    children_[from] = children_[from].with(to);
  }
}

VarSet CausalDag::ancestors(int node) const { return closure(parents_[node], parents_); }
VarSet CausalDag::descendants(int node) const { return closure(children_[node], children_); }
bool CausalDag::is_acyclic() const { return acyclic(nodes_, parents_); }

std::string CausalDag::to_string() const {
  std::string s = nodes_.to_string() + ":";
  bool first = true;
  for (const auto& [from, to] : edges_) {
    s += first ? " " : ", ";
    s += std::to_string(from) + "->" + std::to_string(to);
    first = false;
  }
  return s;
}

std::strong_ordering CausalDag::operator<=>(const CausalDag& other) const {
  if (auto c = member_order(nodes_, other.nodes_); c != 0) return c;
  return edges_ <=> other.edges_;
}

// ---------------------------------------------------------------------------

std::vector<std::string> validate(const CausalDag& dag, int n) {
  std::vector<std::string> out;
  if (n < 2 || n > kMaxVariables) {
    out.push_back("variable count out of range");
    return out;
  }
  if (!dag.nodes().subset_of(VarSet::range(1, n)))
    out.push_back("nodes outside {1.." + std::to_string(n) + "}");
  if (!dag.nodes().contains(1)) out.push_back("missing action node 1");
  if (!dag.nodes().contains(n)) out.push_back("missing consequence node " + std::to_string(n));
  if (!dag.is_acyclic()) {
    out.push_back("cycle");
  } else if (dag.nodes().contains(1) && dag.nodes().contains(n) && dag.has_path(n, 1)) {
    out.push_back("path n->1");
  }
  return out;
}

bool is_admissible(const CausalDag& dag, int n) {
  if (n < 2 || n > kMaxVariables) return false;
  const VarSet nodes = dag.nodes();
  return nodes.subset_of(VarSet::range(1, n)) && nodes.contains(1) && nodes.contains(n) &&
         dag.is_acyclic() && !dag.has_path(n, 1);
}

bool is_perfect(const CausalDag& dag) {
  std::array<VarSet, kMaxVariables + 1> parents{};
  std::array<VarSet, kMaxVariables + 1> neighbours{};
  for_each_var(dag.nodes(), [&](int v) {
    parents[v] = dag.parents(v);
    neighbours[v] = dag.neighbours(v);
  });
  return perfect(dag.nodes(), parents, neighbours);
}

bool is_linear(const CausalDag& dag) {
  if (dag.nodes().empty()) return false;
  const int last = dag.nodes().max_var();
  for (int v : dag.nodes().to_vector()) {
    const bool ancestral = dag.parents(v).empty();
    const bool terminal = dag.children(v).empty();
    if (ancestral != (v == 1)) return false;
    if (terminal != (v == last)) return false;
    if (!ancestral && dag.parents(v).size() != 1) return false;
  }
  return true;
}

std::vector<CausalDag> enumerate_dags(int n, const EnumerationOptions& options) {
  if (n < 2 || n > kMaxVariables) throw std::domain_error("variable count out of range");
  if (options.max_nodes < 2) throw std::domain_error("max_nodes must be at least 2");
  if (options.max_nodes > n) throw std::domain_error("max_nodes exceeds the variable count");

  std::vector<CausalDag> out;
  const std::uint32_t middle_count = static_cast<std::uint32_t>(n - 2);
  for (std::uint32_t sub = 0; sub < (1u << middle_count); ++sub) {
    const VarSet nodes = VarSet(sub << 1).with(1).with(n);
    if (nodes.size() > options.max_nodes) continue;
    const auto list = nodes.to_vector();
    std::vector<Edge> pairs;
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j) pairs.emplace_back(list[i], list[j]);

    // Each unordered pair is absent, forward (low->high) or backward. The
    // parent and neighbour sets are updated as the odometer turns.
    std::vector<int> state(pairs.size(), 0);
    std::array<VarSet, kMaxVariables + 1> parents{};
    std::array<VarSet, kMaxVariables + 1> neighbours{};
    auto set_state = [&](std::size_t e, int next) {
      const auto [lo, hi] = pairs[e];
      parents[hi] = parents[hi].without(lo);
      parents[lo] = parents[lo].without(hi);
      if (next == 1) parents[hi] = parents[hi].with(lo);
      if (next == 2) parents[lo] = parents[lo].with(hi);
      neighbours[lo] = next == 0 ? neighbours[lo].without(hi) : neighbours[lo].with(hi);
      neighbours[hi] = next == 0 ? neighbours[hi].without(lo) : neighbours[hi].with(lo);
      state[e] = next;
    };
    while (true) {
      bool ok = true;
      if (options.action_ancestral && !parents[1].empty()) ok = false;
      if (ok) ok = acyclic(nodes, parents);
      if (ok && options.perfect_only) ok = perfect(nodes, parents, neighbours);
      if (ok) ok = !closure(parents[1], parents).contains(n);
      if (ok) {
        std::vector<Edge> edges;
        for (std::size_t e = 0; e < pairs.size(); ++e) {
          if (state[e] == 1) edges.push_back(pairs[e]);
          if (state[e] == 2) edges.emplace_back(pairs[e].second, pairs[e].first);
        }
        out.emplace_back(nodes, std::move(edges));
      }
      std::size_t e = 0;
      while (e < state.size() && state[e] == 2) set_state(e++, 0);
      if (e == state.size()) break;
      set_state(e, state[e] + 1);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

CausalDag fully_connected(VarSet nodes) {
  const auto list = nodes.to_vector();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = i + 1; j < list.size(); ++j) edges.emplace_back(list[i], list[j]);
  return CausalDag(nodes, std::move(edges));
}

std::vector<VarSet> maximal_cliques(const CausalDag& dag) {
  if (!is_perfect(dag))
    throw UnsupportedStructure("maximal cliques requested for imperfect DAG " + dag.to_string());
  const std::uint32_t all = dag.nodes().mask();
  // is_clique[s] for every submask s of the node set, grown one node at a time.
  // Ascending order visits s without its lowest node before s itself.
  std::vector<bool> is_clique(std::size_t{all} + 1, false);
  is_clique[0] = true;
  for (std::uint32_t s = 1; s <= all; ++s) {
    if ((s & ~all) != 0) continue;
    const int low = std::countr_zero(s) + 1;
    const VarSet rest = VarSet(s).without(low);
    is_clique[s] = is_clique[rest.mask()] && rest.subset_of(dag.neighbours(low));
  }
  std::vector<std::uint32_t> found;
  for (std::uint32_t s = 1; s <= all; ++s) {
    if ((s & ~all) != 0 || !is_clique[s]) continue;
    bool maximal = true;
    for (std::uint32_t m = all & ~s; m != 0 && maximal; m &= m - 1)
      if (is_clique[s | (m & (~m + 1u))]) maximal = false;
    if (maximal) found.push_back(s);
  }
  std::vector<VarSet> out;
  for (auto s : found) out.emplace_back(s);
  std::sort(out.begin(), out.end(), [](VarSet a, VarSet b) { return member_order(a, b) < 0; });
  return out;
}

std::vector<int> JunctionTree::path(int from, int to) const {
  const int count = static_cast<int>(cliques.size());
  std::vector<int> prev(count, -1);
  std::vector<bool> seen(count, false);
  std::vector<int> queue{from};
  seen[from] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int c = queue[head];
    for (const auto& [u, v] : tree_edges) {
      const int other = (u == c) ? v : (v == c) ? u : -1;
      if (other < 0 || seen[other]) continue;
      seen[other] = true;
      prev[other] = c;
      queue.push_back(other);
    }
  }
  if (!seen[to]) return {};
  std::vector<int> out;
  for (int c = to; c != -1; c = prev[c]) out.push_back(c);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::string> junction_tree_violations(const JunctionTree& tree) {
  std::vector<std::string> out;
  const int count = static_cast<int>(tree.cliques.size());
  if (tree.separators.size() != tree.tree_edges.size())
    out.push_back("separator list does not match tree edges");
  // Forest check via union-find.
  std::vector<int> root(count);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (std::size_t e = 0; e < tree.tree_edges.size(); ++e) {
    const auto [u, v] = tree.tree_edges[e];
    if (u < 0 || v < 0 || u >= count || v >= count) {
      out.push_back("tree edge references a missing clique");
      return out;
    }
    if (find(u) == find(v)) out.push_back("tree edges contain a cycle");
    root[find(u)] = find(v);
    if (e < tree.separators.size() &&
        tree.separators[e] != (tree.cliques[u] & tree.cliques[v]))
      out.push_back("separator differs from the clique intersection");
  }
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      const VarSet shared = tree.cliques[i] & tree.cliques[j];
      const auto p = tree.path(i, j);
      if (p.empty()) {
        if (!shared.empty())
          out.push_back("cliques " + tree.cliques[i].to_string() + " and " +
                        tree.cliques[j].to_string() + " intersect but are disconnected");
        continue;
      }
      for (int c : p)
        if (!shared.subset_of(tree.cliques[c]))
          out.push_back("running intersection fails between " + tree.cliques[i].to_string() +
                        " and " + tree.cliques[j].to_string());
    }
  return out;
}

JunctionTree junction_tree(const CausalDag& dag) {
  JunctionTree tree;
  tree.cliques = maximal_cliques(dag);
  const int count = static_cast<int>(tree.cliques.size());

  struct Candidate {
    int weight, u, v;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      const int w = (tree.cliques[i] & tree.cliques[j]).size();
      if (w > 0) candidates.push_back({w, i, j});
    }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.weight > b.weight; });

  std::vector<int> root(count);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (const auto& c : candidates) {
    if (find(c.u) == find(c.v)) continue;
    root[find(c.u)] = find(c.v);
    tree.tree_edges.emplace_back(c.u, c.v);
    tree.separators.push_back(tree.cliques[c.u] & tree.cliques[c.v]);
  }
  if (auto bad = junction_tree_violations(tree); !bad.empty())
    throw std::logic_error("junction tree verification failed for " + dag.to_string() + ": " +
                           bad.front());
  return tree;
}

bool d_separated(const CausalDag& dag, VarSet a, VarSet b, VarSet z) {
  if (!a.disjoint(b) || !a.disjoint(z) || !b.disjoint(z))
    throw std::domain_error("d-separation sets must be disjoint");
  const VarSet all = a | b | z;
  if (!all.subset_of(dag.nodes())) throw std::domain_error("d-separation set outside the DAG");
  if (a.empty() || b.empty()) return true;

  VarSet keep = all;
  for (int v : all.to_vector()) keep = keep | dag.ancestors(v);

  // Moral graph of the ancestral subgraph.
  std::array<VarSet, kMaxVariables + 1> adj{};
  for (int v : keep.to_vector()) {
    const VarSet pa = dag.parents(v) & keep;
    for (int u : pa.to_vector()) {
      adj[u] = adj[u].with(v);
      adj[v] = adj[v].with(u);
      adj[u] = adj[u] | pa.without(u);
    }
  }
  const VarSet open = keep - z;
  VarSet reached = a;
  VarSet frontier = a;
  while (!frontier.empty()) {
    VarSet next;
    for (int v : frontier.to_vector()) next = next | (adj[v] & open);
    frontier = next - reached;
    reached = reached | next;
  }
  return (reached & b).empty();
}

}  // namespace narrative
