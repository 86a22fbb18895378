#include "narrative/equilibrium.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

namespace narrative {

namespace {

// Policies closer than this are the same policy.
constexpr double kPolicyTol = 1e-9;
// Largest |U_r - U_l| accepted at a mixed root.
constexpr double kRootResidual = 1e-8;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("action frequency must lie in (0,1), got " + std::to_string(alpha));
}

NarrativeEval make_eval(const OutcomeBelief& belief, double alpha, const Model& model) {
  const double lo = model.epsilon;
  const double hi = 1.0 - model.epsilon;
  const double mid = std::clamp(alpha, lo, hi);
  NarrativeEval e;
  e.belief = belief;
  e.best = best_policy(belief, model.cost, model.d_star, lo, hi);
  e.right = best_policy(belief, model.cost, model.d_star, mid, hi);
  e.left = best_policy(belief, model.cost, model.d_star, lo, mid);
  return e;
}

template <class F>
double bisect(double lo, double hi, double f_lo, const SolverOptions& opts, F&& f) {
  for (int it = 0; it < opts.max_bisections && hi - lo > opts.root_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void insert_unique(std::vector<double>& xs, double x) {
  for (double v : xs)
    if (std::abs(v - x) <= kPolicyTol) return;
  xs.push_back(x);
  std::sort(xs.begin(), xs.end());
}

// Narratives in `group` tied at (roughly) the same policy as the first one.
std::vector<Maximizer> same_policy(const std::vector<Maximizer>& group) {
  std::vector<Maximizer> out;
  for (const auto& m : group)
    if (std::abs(m.d - group.front().d) <= kPolicyTol) out.push_back(m);
  return out;
}

bool all_rational(const std::vector<SupportEntry>& support, const BestResponse& br) {
  return std::all_of(support.begin(), support.end(), [&](const SupportEntry& e) {
    return std::abs(br.evals[e.narrative].belief.slope()) <= kRationalTolerance;
  });
}

std::optional<EquilibriumSolution> pure_solution(const BestResponse& br, double alpha) {
  std::vector<SupportEntry> support;
  for (const auto& m : br.maximizers)
    if (std::abs(m.d - alpha) <= kPolicyTol) support.push_back({m.narrative, m.d, 0.0});
  if (support.empty()) return std::nullopt;
  for (auto& e : support) e.weight = 1.0 / static_cast<double>(support.size());
  EquilibriumSolution s;
  s.alpha = alpha;
  s.u_star = br.value;
  s.kind = all_rational(support, br) ? EquilibriumSolution::Kind::rational_expectations
                                     : EquilibriumSolution::Kind::pure;
  s.support = std::move(support);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string Model::describe(std::size_t narrative) const {
  const std::size_t f = family_of(narrative);
  const std::size_t d = dag_of(narrative);
  const std::string fl = f < family_labels.size() ? family_labels[f] : "q" + std::to_string(f);
  const std::string dl = d < dag_labels.size() ? dag_labels[d] : dags[d].to_string();
  return fl + " | " + dl;
}

void Model::check() const {
  if (families.empty()) throw std::domain_error("model has no conditional families");
  if (dags.empty()) throw std::domain_error("model has no DAGs");
  if (!(mu > 0.0 && mu < 1.0)) throw std::domain_error("mu must lie in (0,1)");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::domain_error("epsilon must lie in (0,0.5)");
  if (!(d_star >= epsilon && d_star <= 1.0 - epsilon))
    throw std::domain_error("ideal policy must lie in [epsilon, 1-epsilon]");
  if (solver.scan_points < 2) throw std::domain_error("scan needs at least two points");
  for (const auto& q : families) {
    if (q.n() != n) throw std::domain_error("conditional family has the wrong variable count");
    if (!(q.min_entry() > 0.0)) throw std::domain_error("conditional family lacks full support");
  }
  for (const auto& dag : dags)
    if (auto bad = validate(dag, n); !bad.empty())
      throw std::domain_error("DAG " + dag.to_string() + " is not admissible: " + bad.front());
}

PolicyChoice best_policy(const OutcomeBelief& belief, const CostFunction& cost, double d_star,
                         double lo, double hi) {
  if (!(lo <= hi)) throw std::domain_error("empty policy interval");
  const double slope = belief.slope();
  double d;
  if (cost.kind() == CostFunction::Kind::quadratic) {
    d = std::clamp(d_star + slope / (2.0 * cost.k()), lo, hi);
  } else {
    // U'(d) = slope - C'(d - d*) is decreasing.
    auto deriv = [&](double x) { return slope - cost.derivative(x - d_star); };
    if (deriv(lo) <= 0.0) {
      d = lo;
    } else if (deriv(hi) >= 0.0) {
      d = hi;
    } else {
      double a = lo, b = hi;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        (deriv(m) > 0.0 ? a : b) = m;
      }
      d = 0.5 * (a + b);
    }
  }
  return {d, net_utility(belief, d, cost, d_star)};
}

NarrativeEval evaluate_narrative(double alpha, const Model& model, std::size_t narrative) {
  check_alpha(alpha);
  const auto p = build_joint(alpha, model.mu, model.families[model.family_of(narrative)]);
  const Belief b = factorize(p, model.dags[model.dag_of(narrative)]);
  return make_eval(b.outcome_belief(), alpha, model);
}

std::vector<NarrativeEval> evaluate_narratives(double alpha, const Model& model, Execution exec) {
  check_alpha(alpha);
  const std::size_t count = model.narrative_count();
  std::vector<NarrativeEval> out(count);

  if (exec == Execution::serial) {
    for (std::size_t s = 0; s < count; ++s) out[s] = evaluate_narrative(alpha, model, s);
    return out;
  }

  const long families = static_cast<long>(model.families.size());
  const std::size_t dags = model.dags.size();
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long f = 0; f < families; ++f) {
    try {
      const auto p = build_joint(alpha, model.mu, model.families[f]);
      MarginalCache cache(p);
      for (std::size_t d = 0; d < dags; ++d) {
        const Belief b = factorize(cache, model.dags[d]);
        out[static_cast<std::size_t>(f) * dags + d] = make_eval(b.outcome_belief(), alpha, model);
      }
    } catch (...) {
#pragma omp critical(narrative_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

BestResponse best_response(double alpha, const Model& model, Execution exec) {
  model.check();
  BestResponse br;
  br.alpha = alpha;
  br.evals = evaluate_narratives(alpha, model, exec);
  br.value = br.right_value = br.left_value = -std::numeric_limits<double>::infinity();
  for (const auto& e : br.evals) {
    br.value = std::max(br.value, e.best.value);
    br.right_value = std::max(br.right_value, e.right.value);
    br.left_value = std::max(br.left_value, e.left.value);
  }
  const double tie = model.solver.tie_tol;
  for (std::size_t s = 0; s < br.evals.size(); ++s) {
    const auto& e = br.evals[s];
    if (e.best.value >= br.value - tie) br.maximizers.push_back({s, e.best.d, e.best.value});
    if (e.right.value >= br.right_value - tie) br.right.push_back({s, e.right.d, e.right.value});
    if (e.left.value >= br.left_value - tie) br.left.push_back({s, e.left.d, e.left.value});
  }
  return br;
}

std::string to_string(EquilibriumSolution::Kind kind) {
  switch (kind) {
    case EquilibriumSolution::Kind::pure: return "pure";
    case EquilibriumSolution::Kind::mixed: return "mixed";
    case EquilibriumSolution::Kind::rational_expectations: return "rational_expectations";
  }
  return "unknown";
}

SolveResult solve(const Model& model) {
  model.check();
  const SolverOptions& opts = model.solver;
  const Execution exec = opts.parallel ? Execution::parallel : Execution::serial;
  SolveResult result;

  // Rational-expectations point: every maximiser at alpha = d* proposes d*.
  {
    const auto br = best_response(model.d_star, model, exec);
    const bool degenerate = std::all_of(br.maximizers.begin(), br.maximizers.end(),
                                        [&](const Maximizer& m) {
                                          return std::abs(m.d - model.d_star) <= kPolicyTol;
                                        });
    if (degenerate) {
      result.solution = pure_solution(br, model.d_star);
      result.pure_points.push_back(model.d_star);
      return result;
    }
  }

  const double lo = model.epsilon;
  const double hi = 1.0 - model.epsilon;
  const int points = opts.scan_points;
  struct Bracket {
    std::size_t narrative;
    double lo, hi, f_lo;
  };
  std::vector<Bracket> pure_brackets;
  std::vector<double> pure_exact;
  std::vector<std::array<double, 3>> g_brackets;  // lo, hi, g(lo)
  std::vector<double> g_exact;

  std::vector<double> prev_phi;
  double prev_alpha = lo;
  double prev_g = 0.0;
  for (int i = 0; i < points; ++i) {
    const double alpha = i + 1 == points ? hi : lo + (hi - lo) * i / (points - 1);
    const auto br = best_response(alpha, model, exec);
    const double g = br.right_value - br.left_value;
    result.g_table.push_back({alpha, g});
    if (g == 0.0) g_exact.push_back(alpha);
    if (i > 0 && ((g < 0.0 && prev_g > 0.0) || (g > 0.0 && prev_g < 0.0)))
      g_brackets.push_back({prev_alpha, alpha, prev_g});

    std::vector<double> phi(br.evals.size());
    for (std::size_t s = 0; s < phi.size(); ++s) {
      phi[s] = br.evals[s].best.d - alpha;
      if (phi[s] == 0.0) pure_exact.push_back(alpha);
      if (i > 0 && ((phi[s] < 0.0 && prev_phi[s] > 0.0) || (phi[s] > 0.0 && prev_phi[s] < 0.0)))
        pure_brackets.push_back({s, prev_alpha, alpha, prev_phi[s]});
    }
    prev_phi = std::move(phi);
    prev_alpha = alpha;
    prev_g = g;
  }

  // Pure candidates: some narrative's own optimum reproduces alpha and is
  // globally optimal there.
  std::vector<double> candidates = pure_exact;
  for (const auto& b : pure_brackets)
    candidates.push_back(bisect(b.lo, b.hi, b.f_lo, opts, [&](double a) {
      return evaluate_narrative(a, model, b.narrative).best.d - a;
    }));
  std::sort(candidates.begin(), candidates.end());
  std::vector<double> checked;
  for (double alpha : candidates) {
    if (std::any_of(checked.begin(), checked.end(),
                    [&](double c) { return std::abs(c - alpha) <= kPolicyTol; }))
      continue;
    checked.push_back(alpha);
    const auto br = best_response(alpha, model, exec);
    if (!result.solution || result.solution->kind == EquilibriumSolution::Kind::mixed) {
      if (auto sol = pure_solution(br, alpha)) {
        insert_unique(result.pure_points, alpha);
        if (!result.solution) result.solution = std::move(sol);
        continue;
      }
    } else if (pure_solution(br, alpha)) {
      insert_unique(result.pure_points, alpha);
    }
  }

  // Mixed candidates: U_r(alpha) = U_l(alpha) with d_l < alpha < d_r.
  std::vector<double> roots = g_exact;
  for (const auto& [a, b, g_a] : g_brackets)
    roots.push_back(bisect(a, b, g_a, opts, [&](double x) {
      const auto br = best_response(x, model, exec);
      return br.right_value - br.left_value;
    }));
  std::sort(roots.begin(), roots.end());
  for (double alpha : roots) {
    const auto br = best_response(alpha, model, exec);
    if (std::abs(br.right_value - br.left_value) > kRootResidual) continue;  // bracket not resolved
    const auto right = same_policy(br.right);
    const auto left = same_policy(br.left);
    const double d_r = right.front().d;
    const double d_l = left.front().d;
    if (d_r - d_l <= kPolicyTol) continue;  // degenerate: covered by the pure scan
    insert_unique(result.mixed_roots, alpha);
    if (result.solution) continue;

    EquilibriumSolution sol;
    sol.alpha = alpha;
    sol.kind = EquilibriumSolution::Kind::mixed;
    sol.u_star = br.value;
    const double w_right = (alpha - d_l) / (d_r - d_l);
    for (const auto& m : left)
      sol.support.push_back({m.narrative, m.d, (1.0 - w_right) / static_cast<double>(left.size())});
    for (const auto& m : right)
      sol.support.push_back({m.narrative, m.d, w_right / static_cast<double>(right.size())});
    result.solution = std::move(sol);
  }

  if (!result.solution)
    result.diagnostic = "no equilibrium found: no self-consistent pure policy and no sign change "
                        "of U_r - U_l over the alpha scan";
  return result;
}

ConsistencyReport consistency_check(const EquilibriumSolution& solution, const Model& model,
                                    double gap_tol, double residual_tol) {
  ConsistencyReport r;
  double u_star = -std::numeric_limits<double>::infinity();
  for (const auto& e : evaluate_narratives(solution.alpha, model, Execution::serial))
    u_star = std::max(u_star, e.best.value);

  double mean = 0.0;
  double total = 0.0;
  for (const auto& entry : solution.support) {
    if (entry.narrative >= model.narrative_count()) {
      r.weights_valid = false;
      r.gaps.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    if (!(entry.weight > 0.0) || entry.d < model.epsilon - 1e-12 ||
        entry.d > 1.0 - model.epsilon + 1e-12)
      r.weights_valid = false;
    const auto p = build_joint(solution.alpha, model.mu,
                               model.families[model.family_of(entry.narrative)]);
    const Belief b = factorize(p, model.dags[model.dag_of(entry.narrative)]);
    const double u = net_utility(b, std::clamp(entry.d, 0.0, 1.0), model.cost, model.d_star);
    r.gaps.push_back(u_star - u);
    mean += entry.weight * entry.d;
    total += entry.weight;
  }
  r.max_gap = r.gaps.empty() ? std::numeric_limits<double>::infinity()
                             : *std::max_element(r.gaps.begin(), r.gaps.end());
  r.consistency_residual = std::abs(solution.alpha - mean);
  r.weight_sum_error = std::abs(total - 1.0);
  r.ok = r.weights_valid && r.max_gap <= gap_tol && r.consistency_residual <= residual_tol &&
         r.weight_sum_error <= residual_tol;
  return r;
}

// ---------------------------------------------------------------------------

CausalDag short_dag(ShortDag kind) {
  if (kind == ShortDag::lever) return CausalDag(VarSet{1, 2, 3}, {{1, 2}, {2, 3}});
  return CausalDag(VarSet{1, 2, 3}, {{1, 3}, {2, 3}});
}

double short_narrative_belief(ShortDag dag, const X2Pattern& pattern, double alpha, double mu,
                              int target) {
  if (target != 0 && target != 1) throw std::domain_error("target action must be 0 or 1");
  const auto q = ConditionalFamily::from_x2(pattern[0], pattern[1], pattern[2], pattern[3]);
  const Belief b = factorize(build_joint(alpha, mu, q), short_dag(dag));
  return b.outcome[target][1];
}

NarrativeSearchResult optimal_narrative_search(ShortDag dag, double alpha, double mu, int target,
                                               const NarrativeSearchOptions& options) {
  if (!(options.delta > 0.0 && options.delta < 0.1))
    throw std::domain_error("corner offset must lie in (0, 0.1)");
  if (!(options.grid > 0.0 && options.grid < 0.5))
    throw std::domain_error("grid step must lie in (0, 0.5)");
  const double lo = options.delta;
  const double hi = 1.0 - options.delta;

  NarrativeSearchResult r;
  r.corner_value = -1.0;
  for (unsigned c = 0; c < 16; ++c) {
    X2Pattern pat;
    for (int k = 0; k < 4; ++k) pat[k] = ((c >> k) & 1u) ? hi : lo;
    const double v = short_narrative_belief(dag, pat, alpha, mu, target);
    r.corners.emplace_back(pat, v);
    if (v > r.corner_value) {
      r.corner_value = v;
      r.best_corner = pat;
    }
  }
  r.best = r.best_corner;
  r.value = r.corner_value;

  // Local grid: up to four steps inward from the winning corner per coordinate.
  constexpr int kSteps = 5;
  for (int idx = 0; idx < kSteps * kSteps * kSteps * kSteps; ++idx) {
    X2Pattern pat;
    int rest = idx;
    for (int k = 0; k < 4; ++k) {
      const int step = rest % kSteps;
      rest /= kSteps;
      const double inward = r.best_corner[k] > 0.5 ? -1.0 : 1.0;
      pat[k] = std::clamp(r.best_corner[k] + inward * step * options.grid, lo, hi);
    }
    const double v = short_narrative_belief(dag, pat, alpha, mu, target);
    if (v > r.value) {
      r.value = v;
      r.best = pat;
    }
  }
  return r;
}

double lever_bound(double alpha, double mu) {
  check_alpha(alpha);
  if (!(mu > 0.0 && mu < 1.0)) throw std::domain_error("mu must lie in (0,1)");
  return mu / (mu + alpha * (1.0 - mu));
}

double opportunity_bound(double alpha, double mu) {
  check_alpha(alpha);
  if (!(mu > 0.0 && mu < 1.0)) throw std::domain_error("mu must lie in (0,1)");
  return 1.0 - alpha * (1.0 - mu);
}

}  // namespace narrative
