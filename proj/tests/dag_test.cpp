#include <doctest.h>

#include <algorithm>

#include "narrative/dag.hpp"
#include "support.hpp"

using namespace narrative;

namespace {

CausalDag chain3() { return CausalDag(VarSet{1, 2, 3}, {{1, 2}, {2, 3}}); }
CausalDag collider3() { return CausalDag(VarSet{1, 2, 3}, {{1, 3}, {2, 3}}); }

// 1 -> 2 -> 4 -> 6 with 1 -> 3, 2 -> 3, 3 -> 4, 3 -> 5, 4 -> 5, 5 -> 6.
CausalDag six_node() {
  return CausalDag(VarSet::range(1, 6),
                   {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}, {4, 6}, {5, 6}});
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_SUITE("dag") {

TEST_CASE("validate reports each violated restriction") {
  CHECK(validate(chain3(), 3).empty());
  CHECK(contains(validate(CausalDag(VarSet{1, 2, 3}, {{3, 1}}), 3), "path n->1"));
  const auto cyc = validate(CausalDag(VarSet{1, 2, 3}, {{1, 2}, {2, 1}}), 3);
  CHECK(contains(cyc, "cycle"));
  CHECK_FALSE(validate(CausalDag(VarSet{1, 2}, {{1, 2}}), 3).empty());  // consequence missing
  CHECK_FALSE(validate(chain3(), 2).empty());                          // node beyond n
  CHECK_THROWS_AS(CausalDag(VarSet{1, 3}, {{1, 2}}), std::domain_error);
  CHECK_THROWS_AS(CausalDag(VarSet{1, 3}, {{1, 3}, {1, 3}}), std::domain_error);
}

TEST_CASE("perfection") {
  CHECK(is_perfect(chain3()));
  CHECK_FALSE(is_perfect(collider3()));
  CHECK(is_perfect(six_node()));
}

TEST_CASE("is_perfect agrees with a triple scan on every DAG up to five nodes") {
  const auto all = enumerate_dags(5, {5, false, false});
  CHECK(all.size() == 18690);
  for (const auto& dag : all) REQUIRE(is_perfect(dag) == testing::brute_perfect(dag));
}

TEST_CASE("linearity") {
  CHECK(is_linear(chain3()));
  CHECK_FALSE(is_linear(collider3()));
  CHECK_FALSE(is_linear(CausalDag(VarSet{1, 2, 3, 4}, {{1, 2}, {2, 4}, {1, 3}, {3, 4}})));
  CHECK(is_linear(CausalDag(VarSet{1, 3}, {{1, 3}})));
  CHECK_FALSE(is_linear(CausalDag(VarSet{1, 3}, {})));
}

TEST_CASE("enumeration") {
  const auto three = enumerate_dags(3, {3, false, true});
  CHECK(three.size() == 14);
  CHECK(std::find(three.begin(), three.end(), chain3()) != three.end());
  CHECK(std::find(three.begin(), three.end(), collider3()) != three.end());
  CHECK(std::is_sorted(three.begin(), three.end()));

  const auto perfect = enumerate_dags(3, {3, true, true});
  CHECK(perfect.size() == 12);
  CHECK(std::find(perfect.begin(), perfect.end(), collider3()) == perfect.end());

  const auto two = enumerate_dags(3, {2, false, false});
  REQUIRE(two.size() == 2);
  CHECK(two[0] == CausalDag(VarSet{1, 3}, {}));
  CHECK(two[1] == CausalDag(VarSet{1, 3}, {{1, 3}}));

  CHECK(enumerate_dags(3, {3, false, false}).size() == 18);
  CHECK(enumerate_dags(3, {3, true, false}).size() == 16);
  CHECK(enumerate_dags(4, {4, false, true}).size() == 226);
  CHECK(enumerate_dags(4, {4, true, true}).size() == 129);
  CHECK(enumerate_dags(4, {4, false, false}).size() == 370);
  CHECK(enumerate_dags(4, {4, true, false}).size() == 233);
  for (const auto& dag : enumerate_dags(4, {4, false, false})) CHECK(validate(dag, 4).empty());

  CHECK_THROWS_AS(enumerate_dags(3, {1, false, false}), std::domain_error);
  CHECK_THROWS_AS(enumerate_dags(3, {4, false, false}), std::domain_error);
}

TEST_CASE("maximal cliques") {
  CHECK(maximal_cliques(chain3()) == std::vector<VarSet>{VarSet{1, 2}, VarSet{2, 3}});
  CHECK(maximal_cliques(fully_connected(VarSet{1, 2, 3})) == std::vector<VarSet>{VarSet{1, 2, 3}});
  const auto six = maximal_cliques(six_node());
  CHECK(std::find(six.begin(), six.end(), VarSet{1, 2, 3}) != six.end());
  CHECK(std::find(six.begin(), six.end(), VarSet{4, 5, 6}) != six.end());
  CHECK_THROWS_AS(maximal_cliques(collider3()), UnsupportedStructure);

  for (const auto& dag : enumerate_dags(5, {5, true, false})) {
    auto ours = maximal_cliques(dag);
    std::sort(ours.begin(), ours.end());
    REQUIRE(ours == testing::brute_cliques(dag));
  }
}

TEST_CASE("junction trees") {
  const auto chain = junction_tree(chain3());
  CHECK(chain.cliques.size() == 2);
  REQUIRE(chain.separators.size() == 1);
  CHECK(chain.separators[0] == VarSet{2});

  const auto single = junction_tree(fully_connected(VarSet{1, 2, 3}));
  CHECK(single.cliques.size() == 1);
  CHECK(single.separators.empty());

  const auto six = junction_tree(six_node());
  CHECK(junction_tree_violations(six).empty());
  CHECK(six.cliques.size() == 4);
  CHECK(six.tree_edges.size() == 3);

  // Disconnected skeleton: a forest, and no path between components.
  const auto forest = junction_tree(CausalDag(VarSet{1, 2, 3}, {{2, 3}}));
  CHECK(junction_tree_violations(forest).empty());
  CHECK(forest.tree_edges.empty());
  CHECK(forest.path(0, 1).empty());

  CHECK_THROWS_AS(junction_tree(collider3()), UnsupportedStructure);

  for (const auto& dag : enumerate_dags(5, {5, true, false})) {
    const auto tree = junction_tree(dag);
    REQUIRE(junction_tree_violations(tree).empty());
  }
}

TEST_CASE("the verifier rejects a broken running intersection") {
  JunctionTree bad;
  bad.cliques = {VarSet{1, 2}, VarSet{3, 4}, VarSet{2, 3}};
  bad.tree_edges = {{0, 1}, {1, 2}};  // {1,2} - {3,4} - {2,3}: 2 missing in the middle
  bad.separators = {VarSet{}, VarSet{3}};
  CHECK_FALSE(junction_tree_violations(bad).empty());
}

TEST_CASE("d-separation") {
  CHECK(d_separated(chain3(), VarSet{1}, VarSet{3}, VarSet{2}));
  CHECK_FALSE(d_separated(chain3(), VarSet{1}, VarSet{3}, VarSet{}));
  CHECK(d_separated(collider3(), VarSet{1}, VarSet{2}, VarSet{}));
  CHECK_FALSE(d_separated(collider3(), VarSet{1}, VarSet{2}, VarSet{3}));
  CHECK_THROWS_AS(d_separated(chain3(), VarSet{1}, VarSet{1, 3}, VarSet{}), std::domain_error);
}

TEST_CASE("d-separation matches path enumeration on every four-node DAG") {
  for (const auto& dag : enumerate_dags(4, {4, false, false})) {
    const auto nodes = dag.nodes().to_vector();
    const int k = static_cast<int>(nodes.size());
    int codes = 1;
    for (int i = 0; i < k; ++i) codes *= 4;
    // Each node goes to A, B, Z or nowhere.
    for (int c = 0; c < codes; ++c) {
      VarSet a, b, z;
      int rest = c;
      for (int i = 0; i < k; ++i, rest /= 4) {
        if (rest % 4 == 1) a = a.with(nodes[i]);
        if (rest % 4 == 2) b = b.with(nodes[i]);
        if (rest % 4 == 3) z = z.with(nodes[i]);
      }
      if (a.empty() || b.empty()) continue;
      const bool ours = d_separated(dag, a, b, z);
      REQUIRE(ours == testing::brute_d_separated(dag, a, b, z));
      REQUIRE(ours == d_separated(dag, b, a, z));
    }
  }
}

}  // TEST_SUITE
