#include "narrative/report.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "narrative/linearize.hpp"

namespace narrative {

using nlohmann::json;

namespace {

constexpr double kSameDecision = 1e-9;

struct PolicyGroup {
  double d = 0.0;
  double weight = 0.0;
  std::vector<const SupportEntry*> entries;
};

std::vector<PolicyGroup> group_policies(const EquilibriumSolution& s) {
  std::vector<PolicyGroup> groups;
  for (const auto& e : s.support) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const PolicyGroup& g) {
      return std::abs(g.d - e.d) <= kSameDecision;
    });
    if (it == groups.end()) {
      groups.push_back({e.d, 0.0, {}});
      it = groups.end() - 1;
    }
    it->weight += e.weight;
    it->entries.push_back(&e);
  }
  std::sort(groups.begin(), groups.end(),
            [](const PolicyGroup& a, const PolicyGroup& b) { return a.d < b.d; });
  return groups;
}

json x2_pattern(const ConditionalFamily& q) {
  return {q.x2_prob(0, 0), q.x2_prob(0, 1), q.x2_prob(1, 0), q.x2_prob(1, 1)};
}

// Does q (n = 3) approximate the given deterministic pattern, up to
// relabelling x_2?
bool matches_pattern(const ConditionalFamily& q, const X2Pattern& pattern) {
  if (q.n() != 3) return false;
  bool direct = true;
  bool flipped = true;
  for (int a = 0; a < 2; ++a)
    for (int y = 0; y < 2; ++y) {
      const double p = q.x2_prob(a, y);
      direct = direct && std::abs(p - pattern[2 * a + y]) <= 1e-3;
      flipped = flipped && std::abs(1.0 - p - pattern[2 * a + y]) <= 1e-3;
    }
  return direct || flipped;
}

json check(const std::string& name, double value, double expected, double tolerance) {
  const double delta = std::abs(value - expected);
  return {{"name", name},       {"value", value},  {"expected", expected},
          {"delta", delta},     {"tolerance", tolerance},
          {"pass", delta < tolerance}};
}

json check_at_least(const std::string& name, double value, double bound) {
  return {{"name", name},   {"value", value}, {"expected", ">= " + std::to_string(bound)},
          {"delta", std::max(0.0, bound - value)}, {"tolerance", 0.0}, {"pass", value >= bound}};
}

json check_at_most(const std::string& name, double value, double bound) {
  return {{"name", name},   {"value", value}, {"expected", "<= " + std::to_string(bound)},
          {"delta", std::max(0.0, value - bound)}, {"tolerance", 0.0}, {"pass", value <= bound}};
}

json check_true(const std::string& name, bool ok) {
  return {{"name", name}, {"value", ok}, {"expected", true}, {"pass", ok}};
}

std::string format_csv_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Policies of a two-sided solution; NaN when a side is missing.
struct Sides {
  double d_r = std::numeric_limits<double>::quiet_NaN();
  double d_l = std::numeric_limits<double>::quiet_NaN();
  double weight_r = std::numeric_limits<double>::quiet_NaN();
  const PolicyGroup* right = nullptr;
  const PolicyGroup* left = nullptr;
};

Sides sides_of(const std::vector<PolicyGroup>& groups, double d_star) {
  Sides s;
  for (const auto& g : groups) {
    if (g.d > d_star + kSameDecision && !s.right) s.right = &g;
    if (g.d < d_star - kSameDecision) s.left = &g;
  }
  if (s.right) {
    s.d_r = s.right->d;
    s.weight_r = s.right->weight;
  }
  if (s.left) s.d_l = s.left->d;
  return s;
}

bool group_uses(const PolicyGroup* g, const Model& m, const CausalDag& dag,
                const X2Pattern* pattern) {
  if (!g) return false;
  return std::all_of(g->entries.begin(), g->entries.end(), [&](const SupportEntry* e) {
    if (!(m.dags[m.dag_of(e->narrative)] == dag)) return false;
    return !pattern || matches_pattern(m.families[m.family_of(e->narrative)], *pattern);
  });
}

json verify_checks(const std::string& name, const ScenarioConfig& config, const Model& model,
                   const EquilibriumSolution& sol, std::string& reference) {
  const auto groups = group_policies(sol);
  const Sides s = sides_of(groups, model.d_star);
  const double k = config.cost.k;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const CausalDag lever = short_dag(ShortDag::lever);
  const CausalDag collider = short_dag(ShortDag::collider);
  json checks = json::array();

  if (name == "claim1") {
    reference = "alpha = 2 - sqrt(2); hawkish collider policy 1/2 + sqrt(2)/(8k), dovish lever "
                "policy 1/2 - sqrt(2)/(8k)";
    const double alpha = 2.0 - std::sqrt(2.0);
    const double d_r = 0.5 + std::sqrt(2.0) / (8.0 * k);
    const double d_l = 0.5 - std::sqrt(2.0) / (8.0 * k);
    checks.push_back(check("alpha", sol.alpha, alpha, 1e-3));
    checks.push_back(check("d_hawk", s.d_r, d_r, 1e-3));
    checks.push_back(check("d_dove", s.d_l, d_l, 1e-3));
    checks.push_back(check("weight_hawk", s.weight_r, (alpha - d_l) / (d_r - d_l), 1e-3));
    checks.push_back(check_true("hawk_uses_collider", group_uses(s.right, model, collider, nullptr)));
    checks.push_back(check_true("dove_uses_lever", group_uses(s.left, model, lever, nullptr)));
  } else if (name == "claim2") {
    reference = "alpha = 5/4 - sqrt(9 + 2/k)/4; lever policy 2 - sqrt(9 + 2/k)/2 against "
                "rational-expectations narratives at d*";
    const double root = std::sqrt(9.0 + 2.0 / k);
    const double alpha = 1.25 - 0.25 * root;
    const double d_l = 2.0 - 0.5 * root;
    const double d_star = model.d_star;
    const PolicyGroup* ideal = nullptr;
    for (const auto& g : groups)
      if (std::abs(g.d - d_star) <= 1e-6) ideal = &g;
    checks.push_back(check("alpha", sol.alpha, alpha, 1e-3));
    checks.push_back(check("d_lever", s.d_l, d_l, 1e-3));
    checks.push_back(check("weight_lever", s.left ? s.left->weight : nan,
                           (d_star - alpha) / (d_star - d_l), 1e-3));
    checks.push_back(check("weight_ideal", ideal ? ideal->weight : nan,
                           (alpha - d_l) / (d_star - d_l), 1e-3));
    checks.push_back(check_true("dove_uses_lever", group_uses(s.left, model, lever, nullptr)));
    checks.push_back(check_true("no_hawkish_policy", s.right == nullptr));
  } else if (name == "short-narratives") {
    reference = "lever narratives with x2 = y + a(1-y) right of d* and x2 = y + (1-a)(1-y) "
                "left of d*; alpha = 1/2 at d* = 1/2, else strictly between 1/2 and d*";
    const X2Pattern right{0, 1, 1, 1};
    const X2Pattern left{1, 1, 0, 1};
    if (std::abs(model.d_star - 0.5) < 1e-12) {
      checks.push_back(check("alpha", sol.alpha, 0.5, 1e-6));
    } else {
      const double lo = std::min(0.5, model.d_star);
      const double hi = std::max(0.5, model.d_star);
      checks.push_back(check_true("alpha_between_half_and_ideal",
                                  sol.alpha > lo + kSameDecision && sol.alpha < hi - kSameDecision));
    }
    checks.push_back(check_true("right_lever_pattern", group_uses(s.right, model, lever, &right)));
    checks.push_back(check_true("left_lever_pattern", group_uses(s.left, model, lever, &left)));
    const double mu = model.mu;
    const double a = sol.alpha;
    if (s.right) {
      const auto b = evaluate_narrative(a, model, s.right->entries.front()->narrative).belief;
      checks.push_back(check("right_belief_a1", b.y1_given_a[1], mu / (mu + a * (1 - mu)), 1e-4));
      checks.push_back(
          check("right_belief_a0", b.y1_given_a[0], mu * mu / (mu + a * (1 - mu)), 1e-4));
    }
    if (s.left) {
      const auto b = evaluate_narrative(a, model, s.left->entries.front()->narrative).belief;
      checks.push_back(
          check("left_belief_a0", b.y1_given_a[0], mu / (mu + (1 - a) * (1 - mu)), 1e-4));
      checks.push_back(
          check("left_belief_a1", b.y1_given_a[1], mu * mu / (mu + (1 - a) * (1 - mu)), 1e-4));
    }
  } else {
    reference = "alpha = 1/2; collider narratives at the policy bounds with x2 = y + (1-a)(1-y) "
                "(high) and x2 = y + a(1-y) (low)";
    const X2Pattern right{1, 1, 0, 1};
    const X2Pattern left{0, 1, 1, 1};
    checks.push_back(check("alpha", sol.alpha, 0.5, 1e-3));
    checks.push_back(check_at_least("d_r", s.right ? s.d_r : -1.0, 1.0 - model.epsilon - 1e-6));
    checks.push_back(check_at_most("d_l", s.left ? s.d_l : 2.0, model.epsilon + 1e-6));
    checks.push_back(check_true("right_collider_pattern", group_uses(s.right, model, collider, &right)));
    checks.push_back(check_true("left_collider_pattern", group_uses(s.left, model, collider, &left)));
  }
  return checks;
}

}  // namespace

// ---------------------------------------------------------------------------

bool relabel_equivalent(const ConditionalFamily& a, const ConditionalFamily& b) {
  if (a.n() != b.n()) return false;
  const std::uint32_t width = static_cast<std::uint32_t>(a.width());
  for (std::uint32_t flip = 0; flip < width; ++flip) {
    bool same = true;
    for (int r = 0; r < 4 && same; ++r)
      for (std::uint32_t u = 0; u < width && same; ++u)
        same = std::abs(a.rows()[r][u] - b.rows()[r][u ^ flip]) <= 1e-15;
    if (same) return true;
  }
  return false;
}

std::string policy_side(double d, double d_star) {
  if (d > d_star + kSameDecision) return "hawk";
  if (d < d_star - kSameDecision) return "dove";
  return "ideal";
}

json solution_json(const SolveResult& result, const Model& model) {
  json out;
  out["candidates"] = {{"pure", result.pure_points}, {"mixed", result.mixed_roots}};
  if (!result.solution) {
    out["status"] = "no_equilibrium";
    out["diagnostic"] = result.diagnostic;
    json table = json::array();
    for (const auto& [a, g] : result.g_table) table.push_back({a, g});
    out["g_table"] = table;
    return out;
  }
  const auto& sol = *result.solution;
  out["status"] = "ok";

  // Relabel-equivalence classes among the support.
  std::vector<int> cls(sol.support.size(), -1);
  int classes = 0;
  for (std::size_t i = 0; i < sol.support.size(); ++i) {
    if (cls[i] >= 0) continue;
    cls[i] = classes;
    const auto& ei = sol.support[i];
    for (std::size_t j = i + 1; j < sol.support.size(); ++j) {
      const auto& ej = sol.support[j];
      if (cls[j] < 0 && std::abs(ei.d - ej.d) <= kSameDecision &&
          model.dag_of(ei.narrative) == model.dag_of(ej.narrative) &&
          relabel_equivalent(model.families[model.family_of(ei.narrative)],
                             model.families[model.family_of(ej.narrative)]))
        cls[j] = classes;
    }
    ++classes;
  }

  json support = json::array();
  for (std::size_t i = 0; i < sol.support.size(); ++i) {
    const auto& e = sol.support[i];
    const auto& q = model.families[model.family_of(e.narrative)];
    const auto belief = evaluate_narrative(sol.alpha, model, e.narrative).belief;
    json entry{{"narrative", model.describe(e.narrative)},
               {"family", model.family_labels[model.family_of(e.narrative)]},
               {"dag", dag_to_json(model.dags[model.dag_of(e.narrative)])},
               {"d", e.d},
               {"weight", e.weight},
               {"side", policy_side(e.d, model.d_star)},
               {"class", cls[i]},
               {"belief", {{"y1_given_a0", belief.y1_given_a[0]},
                           {"y1_given_a1", belief.y1_given_a[1]}}}};
    if (q.n() == 3) entry["x2_given_ay"] = x2_pattern(q);
    support.push_back(entry);
  }

  json policies = json::array();
  int left = 0;
  int right = 0;
  for (const auto& g : group_policies(sol)) {
    const auto side = policy_side(g.d, model.d_star);
    left += side == "dove";
    right += side == "hawk";
    policies.push_back({{"d", g.d}, {"weight", g.weight}, {"side", side},
                        {"narratives", g.entries.size()}});
  }

  const auto c = consistency_check(sol, model);
  out["equilibrium"] = {
      {"alpha", sol.alpha},
      {"kind", to_string(sol.kind)},
      {"u_star", sol.u_star},
      {"support", support},
      {"policies", policies},
      {"equivalence_classes", classes},
      {"consistency", {{"max_gap", c.max_gap},
                       {"residual", c.consistency_residual},
                       {"weight_sum_error", c.weight_sum_error},
                       {"ok", c.ok}}},
      {"polarization", {{"dove_policies", left},
                        {"hawk_policies", right},
                        {"polarized", left > 0 && right > 0}}},
  };
  return out;
}

CommandResult run_solve(const ScenarioConfig& config) {
  const Model model = build_model(config);
  const SolveResult result = solve(model);
  CommandResult out;
  out.report = solution_json(result, model);
  out.report["schema_version"] = kSchemaVersion;
  out.report["scenario"] = to_json(config);
  out.report["model"] = {{"families", model.families.size()},
                         {"dags", model.dags.size()},
                         {"narratives", model.narrative_count()}};
  if (!config.builtin.empty() && result.solution) {
    std::string reference;
    json checks = verify_checks(config.builtin, config, model, *result.solution, reference);
    const bool pass = std::all_of(checks.begin(), checks.end(),
                                  [](const json& c) { return c["pass"].get<bool>(); });
    out.report["closed_form"] = {{"reference", reference}, {"checks", checks}, {"pass", pass}};
  }
  if (!result.solution) out.exit_code = kExitNoEquilibrium;
  return out;
}

CommandResult run_verify(const std::string& builtin, const BuiltinOverrides& overrides) {
  const ScenarioConfig config = builtin_scenario(builtin, overrides);
  CommandResult solved = run_solve(config);
  CommandResult out;
  out.report = {{"schema_version", kSchemaVersion}, {"builtin", builtin}};
  if (solved.exit_code != kExitOk) {
    out.report["pass"] = false;
    out.report["solve"] = solved.report;
    out.exit_code = solved.exit_code;
    return out;
  }
  const json& cf = solved.report["closed_form"];
  out.report["reference"] = cf["reference"];
  out.report["checks"] = cf["checks"];
  out.report["pass"] = cf["pass"];
  out.report["solve"] = solved.report;
  out.exit_code = cf["pass"].get<bool>() ? kExitOk : kExitVerificationFailed;
  return out;
}

// ---------------------------------------------------------------------------

SweepRange SweepRange::parse(const std::string& text) {
  SweepRange r;
  double* parts[3] = {&r.start, &r.stop, &r.step};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find(':', pos) : text.size();
    if (end == std::string::npos) throw ConfigError("range", "expected A:B:STEP");
    const std::string piece = text.substr(pos, end - pos);
    std::size_t used = 0;
    try {
      *parts[i] = std::stod(piece, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (piece.empty() || used != piece.size())
      throw ConfigError("range", "'" + piece + "' is not a number");
    pos = end + 1;
  }
  if (!(r.step > 0.0)) throw ConfigError("range", "step must be positive");
  if (r.stop < r.start) throw ConfigError("range", "stop must not precede start");
  return r;
}

std::vector<double> SweepRange::values() const {
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

SweepResult run_sweep(const ScenarioConfig& config, const std::string& param,
                      const SweepRange& range) {
  const auto values = range.values();
  std::vector<ScenarioConfig> configs;
  for (double v : values) {
    ScenarioConfig c = config;
    set_parameter(c, param, v);
    configs.push_back(std::move(c));
  }
  std::vector<std::string> rows(values.size());
  std::vector<int> failed(values.size(), 0);
  const long count = static_cast<long>(values.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    SolveResult r;
    Model model;
    try {
      model = build_model(configs[i]);
      r = solve(model);
    } catch (const std::exception& e) {
      r.diagnostic = e.what();
    }
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double u_star = alpha;
    Sides s;
    std::string kind = "none";
    if (r.solution) {
      alpha = r.solution->alpha;
      u_star = r.solution->u_star;
      kind = to_string(r.solution->kind);
      const auto groups = group_policies(*r.solution);
      s = sides_of(groups, model.d_star);
      if (groups.size() == 1) {
        s.d_r = s.d_l = groups.front().d;
        s.weight_r = 1.0;
      } else if (!s.right || !s.left) {
        s.d_r = groups.back().d;
        s.d_l = groups.front().d;
        s.weight_r = groups.back().weight;
      }
    } else {
      failed[i] = 1;
    }
    rows[i] = format_csv_number(values[i]) + "," + format_csv_number(alpha) + "," +
              format_csv_number(s.d_r) + "," + format_csv_number(s.d_l) + "," +
              format_csv_number(s.weight_r) + "," + format_csv_number(u_star) + "," + kind + "\n";
  }
  SweepResult out;
  out.csv = param + ",alpha,d_r,d_l,weight_r,u_star,kind\n";
  for (const auto& row : rows) out.csv += row;
  if (std::any_of(failed.begin(), failed.end(), [](int f) { return f != 0; }))
    out.exit_code = kExitNoEquilibrium;
  return out;
}

// ---------------------------------------------------------------------------

CommandResult run_search(ShortDag dag, double alpha, double mu, int target,
                         const NarrativeSearchOptions& options) {
  const auto r = optimal_narrative_search(dag, alpha, mu, target, options);
  // Bounds for target 0 follow by mirroring the action.
  const double a = target == 1 ? alpha : 1.0 - alpha;
  const double bound = dag == ShortDag::lever ? lever_bound(a, mu) : opportunity_bound(a, mu);
  json corners = json::array();
  for (const auto& [pattern, value] : r.corners)
    corners.push_back({{"pattern", pattern}, {"value", value}});
  CommandResult out;
  out.report = {{"schema_version", kSchemaVersion},
                {"dag", dag == ShortDag::lever ? "lever" : "collider"},
                {"alpha", alpha},
                {"mu", mu},
                {"target", target},
                {"delta", options.delta},
                {"grid", options.grid},
                {"best", {{"pattern", r.best}, {"value", r.value}}},
                {"best_corner", {{"pattern", r.best_corner}, {"value", r.corner_value}}},
                {"bound", bound},
                {"bound_gap", bound - r.value},
                {"corners", corners}};
  return out;
}

JointDistribution distribution_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("dist", "expected an object");
  if (doc.contains("table")) {
    if (!doc.contains("n") || !doc["n"].is_number_integer())
      throw ConfigError("dist.n", "missing or not an integer");
    if (!doc["table"].is_array()) throw ConfigError("dist.table", "expected an array");
    std::vector<double> table;
    for (const auto& v : doc["table"]) {
      if (!v.is_number()) throw ConfigError("dist.table", "expected numbers");
      table.push_back(v.get<double>());
    }
    try {
      return JointDistribution::from_table(doc["n"].get<int>(), std::move(table));
    } catch (const std::exception& e) {
      throw ConfigError("dist.table", e.what());
    }
  }
  for (const char* key : {"alpha", "mu", "q"})
    if (!doc.contains(key)) throw ConfigError(std::string("dist.") + key, "missing required field");
  if (!doc["alpha"].is_number() || !doc["mu"].is_number())
    throw ConfigError("dist", "alpha and mu must be numbers");
  const json& rows = doc["q"];
  if (!rows.is_array() || rows.size() != 4)
    throw ConfigError("dist.q", "expected 4 rows ordered (a,y) = 00, 01, 10, 11");
  std::array<std::vector<double>, 4> q_rows;
  for (int r = 0; r < 4; ++r) {
    if (!rows[r].is_array()) throw ConfigError("dist.q", "rows must be arrays");
    for (const auto& v : rows[r]) {
      if (!v.is_number()) throw ConfigError("dist.q", "expected numbers");
      q_rows[r].push_back(v.get<double>());
    }
  }
  const std::size_t width = q_rows[0].size();
  int n = 2;
  while ((std::size_t{1} << (n - 2)) < width) ++n;
  try {
    ConditionalFamily q(n, q_rows);
    if (doc.contains("delta")) {
      if (!doc["delta"].is_number()) throw ConfigError("dist.delta", "expected a number");
      q = perturb_full_support(q, doc["delta"].get<double>());
    }
    return build_joint(doc["alpha"].get<double>(), doc["mu"].get<double>(), q);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("dist", e.what());
  }
}

CommandResult run_linearize(const json& dag_doc, const json& dist_doc) {
  const CausalDag dag = dag_from_json(dag_doc, "dag");
  const JointDistribution p = distribution_from_json(dist_doc);
  if (auto bad = validate(dag, p.n()); !bad.empty()) throw ConfigError("dag", bad.front());
  if (!is_perfect(dag)) throw ConfigError("dag", "chain reduction needs a perfect DAG");
  if (!p.has_full_support()) throw ConfigError("dist", "distribution lacks full support");

  const Belief belief = factorize(p, dag);
  const ChainReduction chain = reduce_to_chain(p, dag);
  const OutcomeBelief composed = chain.chain_outcome();

  auto sets = [](const std::vector<VarSet>& vs) {
    json out = json::array();
    for (const VarSet v : vs) out.push_back(v.to_vector());
    return out;
  };
  static const char* kinds[] = {"same_clique", "disconnected", "path"};
  json links = json::array();
  for (const auto& link : chain.links)
    links.push_back({{"from", link.from.to_vector()},
                     {"to", link.to.to_vector()},
                     {"matrix", link.matrix}});

  const double deviation = std::max(std::abs(composed.y1_given_a[0] - belief.outcome[0][1]),
                                    std::abs(composed.y1_given_a[1] - belief.outcome[1][1]));
  CommandResult out;
  out.report = {
      {"schema_version", kSchemaVersion},
      {"dag", dag_to_json(dag)},
      {"plan", {{"kind", kinds[static_cast<int>(chain.plan().kind)]},
                {"path_cliques", sets(chain.plan().path_cliques)},
                {"separators", sets(chain.plan().separators)},
                {"pruned", chain.plan().pruned.to_vector()},
                {"chain_nodes", chain.plan().chain_nodes()}}},
      {"links", links},
      {"belief_y1_given_a", {belief.outcome[0][1], belief.outcome[1][1]}},
      {"chain_y1_given_a", {composed.y1_given_a[0], composed.y1_given_a[1]}},
      {"chain_deviation", deviation},
  };
  try {
    const Binarization bin = binarize_chain(chain);
    out.report["binarized"] = {{"z_star", bin.z_star},
                               {"deviation", bin.deviation},
                               {"dag", dag_to_json(bin.dag)}};
  } catch (const std::domain_error& e) {
    out.report["binarized"] = {{"z_star", chain.z_star}, {"error", e.what()}};
  }
  return out;
}

}  // namespace narrative
