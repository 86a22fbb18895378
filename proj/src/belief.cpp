#include "narrative/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace narrative {

namespace {

void require_admissible(int n, bool full_support, const CausalDag& dag) {
  if (!is_admissible(dag, n)) {
    const auto bad = validate(dag, n);
    throw std::domain_error("DAG " + dag.to_string() + " is not admissible: " + bad.front());
  }
  if (!full_support)
    throw std::domain_error("narrative beliefs require a full-support distribution");
}

void require_admissible(const JointDistribution& p, const CausalDag& dag) {
  require_admissible(p.n(), p.has_full_support(), dag);
}

void check_policy(double d) {
  if (!(d >= 0.0 && d <= 1.0))
    throw std::domain_error("policy " + std::to_string(d) + " outside [0,1]");
}

}  // namespace

// ---------------------------------------------------------------------------

CostFunction CostFunction::quadratic(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::domain_error("cost coefficient must be positive");
  return CostFunction(Kind::quadratic, k, 2.0);
}

CostFunction CostFunction::power(double k, double exponent) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::domain_error("cost coefficient must be positive");
  if (!(exponent > 1.0) || !std::isfinite(exponent))
    throw std::domain_error("cost exponent must exceed 1");
  return CostFunction(Kind::power, k, exponent);
}

double CostFunction::operator()(double delta) const {
  if (kind_ == Kind::quadratic) return k_ * delta * delta;
  return k_ * std::pow(std::abs(delta), exponent_);
}

double CostFunction::derivative(double delta) const {
  if (kind_ == Kind::quadratic) return 2.0 * k_ * delta;
  const double mag = exponent_ * k_ * std::pow(std::abs(delta), exponent_ - 1.0);
  return delta < 0.0 ? -mag : mag;
}

// ---------------------------------------------------------------------------

Belief factorize(const JointDistribution& p, const CausalDag& dag) {
  MarginalCache cache(p);
  return factorize(cache, dag);
}

Belief factorize(MarginalCache& marginals, const CausalDag& dag) {
  const JointDistribution& p = marginals.joint();
  require_admissible(p.n(), marginals.full_support(), dag);
  const VarSet nodes = dag.nodes();

  Belief b;
  b.nodes = nodes;
  b.mu = p.mu();
  std::array<Factor, kMaxVariables> factors;
  std::size_t count = 0;
  for_each_var(nodes, [&](int i) {
    const VarSet family = dag.parents(i).with(i);
    factors[count++] = {family, marginals.conditional(i, family).data()};
  });
  b.table = factor_product(nodes, factors.data(), count);
  b.outcome = outcome_conditional(b);
  return b;
}

std::array<std::array<double, 2>, 2> outcome_conditional(const Belief& belief) {
  const int last = belief.nodes.max_var();
  if (!belief.nodes.contains(1) || last < 2)
    throw std::domain_error("belief lacks the action or consequence node");
  // The action is the lowest bit and the consequence the highest.
  const std::size_t half = belief.table.size() / 2;
  const double* t = belief.table.data();
  std::array<std::array<double, 2>, 2> ay{};
  for (std::size_t u = 0; u < half; u += 2) {
    ay[0][0] += t[u];
    ay[1][0] += t[u + 1];
    ay[0][1] += t[half + u];
    ay[1][1] += t[half + u + 1];
  }
  std::array<std::array<double, 2>, 2> out{};
  for (int a = 0; a < 2; ++a) {
    const double pa = ay[a][0] + ay[a][1];
    if (!(pa > 0.0)) throw std::domain_error("belief assigns zero probability to an action");
    out[a][0] = ay[a][0] / pa;
    out[a][1] = ay[a][1] / pa;
  }
  return out;
}

OutcomeBelief outcome_conditional_ancestral(const JointDistribution& p, const CausalDag& dag) {
  require_admissible(p, dag);
  if (!dag.parents(1).empty())
    throw std::domain_error("ancestral shortcut requires node 1 to have no parents");
  const VarSet nodes = dag.nodes();
  const int last = p.n();
  struct Term {
    int node;
    ConditionalTable table;
    Projector to_parents;
  };
  std::vector<Term> terms;
  for_each_var(nodes.without(1), [&](int i) {
    terms.push_back({i, conditional(p, VarSet{}.with(i), dag.parents(i)),
                     Projector(nodes, dag.parents(i))});
  });
  OutcomeBelief out;
  for (std::uint32_t u = 0; u < (1u << nodes.size()); ++u) {
    if (value_of(nodes, u, last) != 1) continue;
    double prod = 1.0;
    for (const auto& t : terms)
      prod *= t.table(t.to_parents(u), static_cast<std::uint32_t>(value_of(nodes, u, t.node)));
    out.y1_given_a[value_of(nodes, u, 1)] += prod;
  }
  return out;
}

double gross_utility(const OutcomeBelief& belief, double d) {
  check_policy(d);
  return d * belief.y1_given_a[1] + (1.0 - d) * belief.y1_given_a[0];
}

double gross_utility(const Belief& belief, double d) {
  return gross_utility(belief.outcome_belief(), d);
}

double net_utility(const OutcomeBelief& belief, double d, const CostFunction& cost,
                   double d_star) {
  return gross_utility(belief, d) - cost(d - d_star);
}

double net_utility(const Belief& belief, double d, const CostFunction& cost, double d_star) {
  return net_utility(belief.outcome_belief(), d, cost, d_star);
}

double nsqd_deviation(const JointDistribution& p, const CausalDag& dag) {
  const Belief b = factorize(p, dag);
  return std::abs(gross_utility(b, p.alpha()) - p.mu());
}

double marginal_distortion(const JointDistribution& p, const CausalDag& dag) {
  MarginalCache cache(p);
  const Belief b = factorize(cache, dag);
  double worst = 0.0;
  for_each_var(dag.nodes(), [&](int i) {
    double subjective = 0.0;
    for (std::uint32_t u = 0; u < b.table.size(); ++u)
      if (value_of(b.nodes, u, i) == 1) subjective += b.table[u];
    worst = std::max(worst, std::abs(subjective - cache(VarSet{}.with(i))[1]));
  });
  return worst;
}

bool is_rational_expectations(const Belief& belief, double tol) {
  return std::abs(belief.outcome[0][1] - belief.mu) <= tol &&
         std::abs(belief.outcome[1][1] - belief.mu) <= tol;
}

// ---------------------------------------------------------------------------

std::vector<Independence> independence_statements(const CausalDag& dag) {
  std::vector<Independence> out;
  for_each_var(dag.nodes(), [&](int i) {
    const VarSet pa = dag.parents(i);
    const VarSet rest = dag.nodes() - dag.descendants(i) - pa - VarSet{}.with(i);
    if (rest.empty()) return;
    Independence s{VarSet{}.with(i), rest, pa};
    if (!d_separated(dag, s.a, s.b, s.given))
      throw std::logic_error("local Markov statement not implied by d-separation");
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Independence& t) {
      return t.given == s.given && t.a == s.b && t.b == s.a;
    });
    if (!duplicate) out.push_back(s);
  });
  return out;
}

double independence_deviation(const JointDistribution& p, const Independence& s) {
  const VarSet all = s.a | s.b | s.given;
  MarginalCache cache(p);
  const auto& abz = cache(all);
  const auto& az = cache(s.a | s.given);
  const auto& bz = cache(s.b | s.given);
  const auto& z = cache(s.given);
  const Projector to_az(all, s.a | s.given);
  const Projector to_bz(all, s.b | s.given);
  const Projector to_z(all, s.given);
  double worst = 0.0;
  for (std::uint32_t u = 0; u < abz.size(); ++u) {
    const double claim = az[to_az(u)] * bz[to_bz(u)] / z[to_z(u)];
    worst = std::max(worst, std::abs(abz[u] - claim));
  }
  return worst;
}

std::vector<CiViolation> ci_violations(const JointDistribution& p, const CausalDag& dag,
                                       double tol) {
  require_admissible(p, dag);
  std::vector<CiViolation> out;
  for (const auto& s : independence_statements(dag)) {
    const double dev = independence_deviation(p, s);
    if (dev > tol) out.push_back({s, dev});
  }
  return out;
}

}  // namespace narrative
