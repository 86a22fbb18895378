// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "narrative/belief.hpp"
#include "narrative/equilibrium.hpp"
#include "narrative/linearize.hpp"
#include "narrative/scenario.hpp"
#include "support.hpp"

using namespace narrative;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
  void require_near(double value, double expected, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.9g, expected %.9g (tol %g)", what.c_str(), value,
                  expected, tol);
    require(std::abs(value - expected) <= tol, buf);
  }
};

struct Policy {
  double d;
  double weight;
  std::vector<std::size_t> narratives;
};

std::vector<Policy> policies_of(const EquilibriumSolution& s) {
  std::vector<Policy> out;
  for (const auto& e : s.support) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const Policy& p) { return std::abs(p.d - e.d) <= 1e-9; });
    if (it == out.end()) {
      out.push_back({e.d, 0.0, {}});
      it = out.end() - 1;
    }
    it->weight += e.weight;
    it->narratives.push_back(e.narrative);
  }
  std::sort(out.begin(), out.end(), [](const Policy& a, const Policy& b) { return a.d < b.d; });
  return out;
}

// Family q (n = 3) is within tol of the deterministic pattern p(x2 = 1 | a, y),
// allowing x2 to be relabelled.
bool has_pattern(const ConditionalFamily& q, const X2Pattern& pattern, double tol = 1e-3) {
  bool direct = true, flipped = true;
  for (int a = 0; a < 2; ++a)
    for (int y = 0; y < 2; ++y) {
      direct = direct && std::abs(q.x2_prob(a, y) - pattern[2 * a + y]) <= tol;
      flipped = flipped && std::abs(1.0 - q.x2_prob(a, y) - pattern[2 * a + y]) <= tol;
    }
  return direct || flipped;
}

bool all_use(const Model& m, const Policy& p, ShortDag dag, const X2Pattern* pattern) {
  for (auto id : p.narratives) {
    if (!(m.dags[m.dag_of(id)] == short_dag(dag))) return false;
    if (pattern && !has_pattern(m.families[m.family_of(id)], *pattern)) return false;
  }
  return true;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome foreign_policy_mixed() {
  Outcome out;
  BuiltinOverrides o;
  o.k = 1.0;
  o.delta = 1e-8;
  o.epsilon = 1e-4;
  const auto t0 = std::chrono::steady_clock::now();
  const Model m = build_model(builtin_scenario("claim1", o));
  const auto r = solve(m);
  const double elapsed = seconds_since(t0);
  if (!r.solution) return {false, "no equilibrium: " + r.diagnostic};
  const auto pol = policies_of(*r.solution);
  out.require(pol.size() == 2, "expected two policies");
  if (!out.pass) return out;
  const double alpha = 2.0 - std::sqrt(2.0);
  const double d_r = 0.5 + std::sqrt(2.0) / 8.0;
  const double d_l = 0.5 - std::sqrt(2.0) / 8.0;
  out.require_near(r.solution->alpha, alpha, 1e-3, "alpha");
  out.require_near(pol[1].d, d_r, 1e-3, "collider policy");
  out.require_near(pol[0].d, d_l, 1e-3, "lever policy");
  out.require_near(pol[1].weight, (alpha - d_l) / (d_r - d_l), 1e-3, "hawkish weight");
  out.require(all_use(m, pol[1], ShortDag::collider, nullptr), "hawkish policy not collider");
  out.require(all_use(m, pol[0], ShortDag::lever, nullptr), "dovish policy not lever");
  out.require(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "alpha=%.6f d_r=%.6f d_l=%.6f w_r=%.6f (%.3f s)",
                r.solution->alpha, pol[1].d, pol[0].d, pol[1].weight, elapsed);
  if (out.pass) out.detail = buf;
  return out;
}

Outcome lever_against_ideal() {
  Outcome out;
  BuiltinOverrides o;
  o.k = 1.0;
  const auto t0 = std::chrono::steady_clock::now();
  const Model m = build_model(builtin_scenario("claim2", o));
  const auto r = solve(m);
  const double elapsed = seconds_since(t0);
  if (!r.solution) return {false, "no equilibrium: " + r.diagnostic};
  const auto pol = policies_of(*r.solution);
  out.require(pol.size() == 2, "expected two policies");
  if (!out.pass) return out;
  const double root = std::sqrt(11.0);
  const double alpha = 1.25 - 0.25 * root;
  const double d_l = 2.0 - 0.5 * root;
  out.require_near(r.solution->alpha, alpha, 1e-3, "alpha");
  out.require_near(pol[0].d, d_l, 1e-3, "lever policy");
  out.require_near(pol[1].d, 0.5, 1e-3, "ideal policy");
  out.require_near(pol[0].weight, (0.5 - alpha) / (0.5 - d_l), 1e-3, "lever weight");
  out.require_near(pol[0].weight, 0.5, 1e-3, "lever weight");
  out.require_near(pol[1].weight, 0.5, 1e-3, "ideal weight");
  out.require(all_use(m, pol[0], ShortDag::lever, nullptr), "dovish policy not lever");
  const auto evals = evaluate_narratives(r.solution->alpha, m);
  for (auto id : pol[1].narratives)
    out.require(std::abs(evals[id].belief.slope()) < 1e-6, "ideal policy with a distorting narrative");
  out.require(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "alpha=%.6f d_l=%.6f w=(%.4f, %.4f) (%.3f s)", r.solution->alpha,
                pol[0].d, pol[0].weight, pol[1].weight, elapsed);
  if (out.pass) out.detail = buf;
  return out;
}

Outcome short_lever_narratives() {
  Outcome out;
  const X2Pattern right{0, 1, 1, 1};  // y + a(1 - y)
  const X2Pattern left{1, 1, 0, 1};   // y + (1 - a)(1 - y)
  const Model m = build_model(builtin_scenario("short-narratives"));
  const auto r = solve(m);
  if (!r.solution) return {false, "no equilibrium: " + r.diagnostic};
  const double alpha = r.solution->alpha;
  out.require_near(alpha, 0.5, 1e-6, "alpha");
  const auto pol = policies_of(*r.solution);
  out.require(pol.size() == 2, "expected two policies");
  if (!out.pass) return out;
  out.require(all_use(m, pol[1], ShortDag::lever, &right), "right policy pattern");
  out.require(all_use(m, pol[0], ShortDag::lever, &left), "left policy pattern");
  const double mu = m.mu;
  const auto evals = evaluate_narratives(alpha, m);
  for (auto id : pol[1].narratives) {
    out.require_near(evals[id].belief.y1_given_a[1], mu / (mu + alpha * (1 - mu)), 1e-4,
                     "right p(y=1|a=1)");
    out.require_near(evals[id].belief.y1_given_a[0], mu * mu / (mu + alpha * (1 - mu)), 1e-4,
                     "right p(y=1|a=0)");
  }
  for (auto id : pol[0].narratives) {
    out.require_near(evals[id].belief.y1_given_a[0], mu / (mu + (1 - alpha) * (1 - mu)), 1e-4,
                     "left p(y=1|a=0)");
    out.require_near(evals[id].belief.y1_given_a[1], mu * mu / (mu + (1 - alpha) * (1 - mu)), 1e-4,
                     "left p(y=1|a=1)");
  }

  BuiltinOverrides o;
  o.d_star = 0.6;
  const auto shifted = solve(build_model(builtin_scenario("short-narratives", o)));
  if (!shifted.solution) return {false, "no equilibrium at d*=0.6: " + shifted.diagnostic};
  const double a6 = shifted.solution->alpha;
  // Strictly inside: separated from both ends by more than the solver's resolution.
  char a6_text[64];
  std::snprintf(a6_text, sizeof a6_text, "alpha at d*=0.6 is %.15f", a6);
  out.require(a6 > 0.5 + 1e-9 && a6 < 0.6 - 1e-9, a6_text);
  char buf[160];
  std::snprintf(buf, sizeof buf, "alpha=%.9f, alpha(d*=0.6)=%.6f", alpha, a6);
  if (out.pass) out.detail = buf;
  return out;
}

Outcome belief_bounds() {
  Outcome out;
  const NarrativeSearchOptions opts{1e-6, 0.05};
  double worst = 0.0;
  for (int i = 1; i <= 9; ++i)
    for (int j = 1; j <= 9; ++j) {
      const double alpha = 0.1 * i, mu = 0.1 * j;
      const auto lv = optimal_narrative_search(ShortDag::lever, alpha, mu, 1, opts);
      const auto co = optimal_narrative_search(ShortDag::collider, alpha, mu, 1, opts);
      const double lever = mu / (mu + alpha * (1 - mu));
      const double collider = 1 - alpha * (1 - mu);
      worst = std::max({worst, std::abs(lv.corner_value - lever), std::abs(co.corner_value - collider)});
      out.require_near(lv.corner_value, lever, 1e-4, "lever max");
      out.require_near(co.corner_value, collider, 1e-4, "collider max");
      out.require(co.corner_value > lv.corner_value, "collider does not beat lever");
    }
  char buf[80];
  std::snprintf(buf, sizeof buf, "81 grid points, max |corner - bound| = %.2e", worst);
  if (out.pass) out.detail = buf;
  return out;
}

Outcome opportunity_extremes() {
  Outcome out;
  const X2Pattern high{1, 1, 0, 1};  // y + (1 - a)(1 - y)
  const X2Pattern low{0, 1, 1, 1};   // y + a(1 - y)
  BuiltinOverrides o;
  o.k = 0.01;
  o.epsilon = 1e-3;
  o.delta = 1e-6;
  const Model m = build_model(builtin_scenario("opportunity", o));
  const auto r = solve(m);
  if (!r.solution) return {false, "no equilibrium: " + r.diagnostic};
  out.require_near(r.solution->alpha, 0.5, 1e-3, "alpha");
  const auto pol = policies_of(*r.solution);
  out.require(pol.size() == 2, "expected two policies");
  if (!out.pass) return out;
  out.require_near(pol[1].d, 1 - m.epsilon, 1e-6, "high policy");
  out.require_near(pol[0].d, m.epsilon, 1e-6, "low policy");
  out.require(all_use(m, pol[1], ShortDag::collider, &high), "high policy narrative");
  out.require(all_use(m, pol[0], ShortDag::collider, &low), "low policy narrative");
  char buf[120];
  std::snprintf(buf, sizeof buf, "alpha=%.6f policies %.6f / %.6f", r.solution->alpha, pol[0].d,
                pol[1].d);
  if (out.pass) out.detail = buf;
  return out;
}

Outcome perfect_dag_properties() {
  Outcome out;
  std::mt19937_64 rng(20240601);
  double worst_dist = 0.0, worst_norm = 0.0, worst_full = 0.0;
  std::size_t evaluated = 0;
  for (int n = 3; n <= 5; ++n) {
    const auto all = enumerate_dags(n, {n, false, false});
    std::vector<CausalDag> perfect;
    for (const auto& d : all)
      if (is_perfect(d)) perfect.push_back(d);
    // Node sets containing a and y, for the fully connected check.
    std::vector<VarSet> node_sets;
    for (std::uint32_t mid = 0; mid < (1u << (n - 2)); ++mid)
      node_sets.push_back(VarSet((mid << 1) | 1u | (1u << (n - 1))));

    for (int t = 0; t < 200; ++t) {
      const auto p = testing::random_joint(n, rng);
      MarginalCache cache(p);
      for (const auto& dag : perfect) {
        const Belief b = factorize(cache, dag);
        // Marginal of each single variable, and V(alpha | alpha) = mu.
        for (int v : dag.nodes().to_vector()) {
          double b1 = 0.0;
          int k = 0;
          for (int u : dag.nodes().to_vector()) {
            if (u == v) break;
            ++k;
          }
          for (std::uint32_t w = 0; w < b.table.size(); ++w)
            if ((w >> k) & 1u) b1 += b.table[w];
          worst_dist = std::max(worst_dist, std::abs(b1 - cache(VarSet{}.with(v))[1]));
        }
        const double v_status_quo = p.alpha() * b.outcome[1][1] + (1 - p.alpha()) * b.outcome[0][1];
        worst_dist = std::max(worst_dist, std::abs(v_status_quo - p.mu()));
        ++evaluated;
      }
      for (const auto& dag : all) {
        const Belief b = factorize(cache, dag);
        double total = 0.0;
        for (double x : b.table) total += x;
        worst_norm = std::max(worst_norm, std::abs(total - 1.0));
      }
      for (VarSet s : node_sets) {
        const Belief b = factorize(cache, fully_connected(s));
        const auto& direct = cache(s);
        for (std::size_t u = 0; u < direct.size(); ++u)
          worst_full = std::max(worst_full, std::abs(b.table[u] - direct[u]));
      }
    }
    // The library's own distortion measures on a subset of joints.
    for (int t = 0; t < 5; ++t) {
      const auto p = testing::random_joint(n, rng);
      for (const auto& dag : perfect) {
        worst_dist = std::max(worst_dist, marginal_distortion(p, dag));
        worst_dist = std::max(worst_dist, nsqd_deviation(p, dag));
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "distortion %.1e, normalisation %.1e, full %.1e", worst_dist,
                worst_norm, worst_full);
  out.require(worst_dist <= 1e-12, std::string("distortion: ") + buf);
  out.require(worst_norm <= 1e-12, std::string("normalisation: ") + buf);
  out.require(worst_full <= 1e-12, std::string("fully connected: ") + buf);
  if (out.pass) out.detail = std::to_string(evaluated) + " perfect narratives; " + buf;
  return out;
}

Outcome linearisation() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(77);
  double worst_chain = 0.0, worst_clique = 0.0, worst_binary = 0.0;
  std::size_t dags_seen = 0, singleton_cases = 0;
  for (int n = 3; n <= 6; ++n) {
    std::vector<CausalDag> perfect;
    for (const auto& d : enumerate_dags(n, {n, true, false})) perfect.push_back(d);
    std::vector<std::shared_ptr<const ChainPlan>> plans;
    plans.reserve(perfect.size());
    for (const auto& d : perfect) plans.push_back(std::make_shared<const ChainPlan>(plan_chain(d)));
    dags_seen += perfect.size();
    // Joint-inner order keeps each DAG's plan in cache across the joints.
    std::vector<JointDistribution> joints;
    for (int t = 0; t < 100; ++t) joints.push_back(testing::random_joint(n, rng));
    std::vector<MarginalCache> caches;
    caches.reserve(joints.size());
    for (const auto& p : joints) caches.emplace_back(p).fill_all();
    const long count = static_cast<long>(perfect.size());
    std::size_t singles = 0;
    bool too_long = false;
#pragma omp parallel for schedule(dynamic, 64) \
    reduction(max : worst_chain, worst_clique, worst_binary) reduction(+ : singles) \
    reduction(|| : too_long)
    for (long i = 0; i < count; ++i) {
      const bool singletons =
          plans[i]->kind == ChainPlan::Kind::path &&
          std::all_of(plans[i]->separators.begin(), plans[i]->separators.end(),
                      [](VarSet s) { return s.size() == 1; });
      too_long = too_long || plans[i]->chain_nodes() > static_cast<int>(perfect[i].nodes().size());
      for (auto& cache : caches) {
        const Belief b = factorize(cache, perfect[i]);
        const auto r = reduce_to_chain(cache, plans[i]);
        const auto chain = r.chain_outcome();
        worst_chain = std::max({worst_chain, std::abs(chain.y1_given_a[0] - b.outcome[0][1]),
                                std::abs(chain.y1_given_a[1] - b.outcome[1][1])});
        const Belief cf = clique_factor_belief(cache, plans[i]->tree);
        for (std::size_t u = 0; u < b.table.size(); ++u)
          worst_clique = std::max(worst_clique, std::abs(cf.table[u] - b.table[u]));
        if (singletons) {
          worst_binary = std::max(worst_binary, binarize_chain(r).deviation);
          ++singles;
        }
      }
    }
    singleton_cases += singles;
    if (too_long) out.require(false, "a chain is longer than its DAG");
  }
  const double elapsed = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%zu DAGs x 100 joints: chain %.1e, cliques %.1e, binarised %.1e over %zu (%.1f s)",
                dags_seen, worst_chain, worst_clique, worst_binary, singleton_cases, elapsed);
  out.require(worst_chain <= 1e-12, std::string("chain: ") + buf);
  out.require(worst_clique <= 1e-12, std::string("cliques: ") + buf);
  out.require(worst_binary <= 1e-12, std::string("binarised: ") + buf);
  out.require(elapsed < 60.0, std::string("runtime: ") + buf);
  if (out.pass) out.detail = buf;
  return out;
}

Outcome polarisation() {
  Outcome out;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int solved = 0;
  for (int s = 0; s < 20; ++s) {
    const int n = s < 12 ? 3 : 4;
    Model m;
    m.n = n;
    m.mu = 0.2 + 0.6 * u(rng);
    m.d_star = 0.3 + 0.4 * u(rng);
    m.cost = CostFunction::quadratic(0.5 + 1.5 * u(rng));
    for (int i = 0; i < 3; ++i) {
      const auto q = testing::random_family(n, rng);
      m.families.push_back(q);
      m.families.push_back(mirror(q));
      m.family_labels.push_back("q" + std::to_string(i));
      m.family_labels.push_back("q" + std::to_string(i) + "~mirror");
    }
    for (const auto& d : enumerate_dags(n, {n, true, true})) {
      m.dags.push_back(d);
      m.dag_labels.push_back(d.to_string());
    }
    const auto r = solve(m);
    const std::string tag = "scenario " + std::to_string(s) + ": ";
    if (!r.solution) {
      out.require(false, tag + "no equilibrium");
      continue;
    }
    ++solved;
    const auto pol = policies_of(*r.solution);
    out.require(pol.size() == 2, tag + std::to_string(pol.size()) + " policies");
    if (pol.size() == 2)
      out.require(pol[0].d < m.d_star && m.d_star < pol[1].d, tag + "policies on one side of d*");
    out.require(consistency_check(*r.solution, m).ok, tag + "consistency check failed");
  }

  const Model claim = build_model(builtin_scenario("claim1"));
  const auto r = solve(claim);
  if (!r.solution) return {false, "foreign-policy scenario: no equilibrium"};
  const auto c = consistency_check(*r.solution, claim);
  out.require(c.consistency_residual < 1e-8 && c.max_gap < 1e-8 && c.weight_sum_error < 1e-8,
              "foreign-policy residuals too large");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/20 polarised; residual %.1e, gap %.1e", solved,
                c.consistency_residual, c.max_gap);
  if (out.pass) out.detail = buf;
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"foreign-policy example: hawkish collider, dovish lever", foreign_policy_mixed},
      {"without the collider: lever against ideal policy", lever_against_ideal},
      {"short narratives: lever patterns and beliefs", short_lever_narratives},
      {"three-variable belief bounds on the 9x9 grid", belief_bounds},
      {"unrestricted three-node DAGs: extreme collider policies", opportunity_extremes},
      {"perfect DAGs: no distortion, normalised, complete DAGs exact", perfect_dag_properties},
      {"chain reduction of perfect DAGs up to six nodes", linearisation},
      {"rich perfect-DAG scenarios are polarised", polarisation},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %zu: %s -- %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
