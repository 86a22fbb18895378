#include "narrative/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace narrative {

namespace {

void check_n(int n, int min_n) {
  if (n < min_n || n > kMaxVariables)
    throw std::domain_error("variable count " + std::to_string(n) +
                            " outside [" + std::to_string(min_n) + ", " +
                            std::to_string(kMaxVariables) + "]");
}

void check_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0))
    throw std::domain_error(std::string(name) + " must lie in (0,1), got " +
                            std::to_string(v));
}

std::vector<double> marginalise(const std::vector<double>& full, int n, VarSet subset) {
  std::vector<double> out(std::size_t{1} << subset.size(), 0.0);
  const Projector proj(VarSet::range(1, n), subset);
  for (std::uint32_t x = 0; x < full.size(); ++x) out[proj(x)] += full[x];
  return out;
}

}  // namespace

std::uint32_t encode(const std::vector<int>& bits) {
  if (bits.size() > static_cast<std::size_t>(kMaxVariables))
    throw std::domain_error("assignment longer than the variable cap");
  std::uint32_t idx = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw std::domain_error("assignment values must be binary");
    idx |= static_cast<std::uint32_t>(bits[i]) << i;
  }
  return idx;
}

std::vector<int> decode(std::uint32_t index, int n) {
  check_n(n, 1);
  if (index >= (1u << n)) throw std::domain_error("assignment index out of range");
  std::vector<int> bits(n);
  for (int i = 0; i < n; ++i) bits[i] = static_cast<int>((index >> i) & 1u);
  return bits;
}

double Table::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

// ---------------------------------------------------------------------------

ConditionalFamily::ConditionalFamily(int n, std::array<std::vector<double>, 4> rows)
    : n_(n), rows_(std::move(rows)) {
  check_n(n, 3);
  const std::size_t width = std::size_t{1} << (n - 2);
  for (std::size_t r = 0; r < 4; ++r) {
    const auto& row = rows_[r];
    if (row.size() != width)
      throw ValidationError("conditional row " + std::to_string(r) + " has " +
                            std::to_string(row.size()) + " entries, expected " +
                            std::to_string(width));
    double s = 0.0;
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ValidationError("conditional row " + std::to_string(r) +
                              " has a negative or non-finite entry");
      s += v;
    }
    if (std::abs(s - 1.0) > kNormTolerance)
      throw ValidationError("conditional row " + std::to_string(r) + " sums to " +
                            std::to_string(s));
  }
}

ConditionalFamily ConditionalFamily::from_x2(double p00, double p01, double p10,
                                             double p11) {
  return ConditionalFamily(3, {std::vector<double>{1.0 - p00, p00},
                               std::vector<double>{1.0 - p01, p01},
                               std::vector<double>{1.0 - p10, p10},
                               std::vector<double>{1.0 - p11, p11}});
}

ConditionalFamily ConditionalFamily::uniform(int n) {
  check_n(n, 3);
  const std::size_t width = std::size_t{1} << (n - 2);
  std::vector<double> row(width, 1.0 / static_cast<double>(width));
  return ConditionalFamily(n, {row, row, row, row});
}

double ConditionalFamily::x2_prob(int a, int y) const {
  const auto& r = row(a, y);
  double s = 0.0;
  for (std::size_t m = 0; m < r.size(); ++m)
    if (m & 1u) s += r[m];
  return s;
}

double ConditionalFamily::min_entry() const {
  double m = 1.0;
  for (const auto& r : rows_)
    for (double v : r) m = std::min(m, v);
  return m;
}

// ---------------------------------------------------------------------------

JointDistribution JointDistribution::from_table(int n, std::vector<double> table) {
  check_n(n, 2);
  if (table.size() != (std::size_t{1} << n))
    throw ValidationError("joint table has " + std::to_string(table.size()) +
                          " entries, expected " + std::to_string(1u << n));
  double total = 0.0;
  for (double v : table) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError("joint table has a negative or non-finite entry");
    total += v;
  }
  if (std::abs(total - 1.0) > kNormTolerance)
    throw ValidationError("joint table sums to " + std::to_string(total));

  // p(a, y) cells: bit 0 is a, bit 1 is y.
  std::array<double, 4> ay{};
  for (std::uint32_t x = 0; x < table.size(); ++x)
    ay[(x & 1u) | (((x >> (n - 1)) & 1u) << 1)] += table[x];
  const double alpha = ay[1] + ay[3];
  check_open_unit(alpha, "alpha");
  const double mu0 = ay[2] / (ay[0] + ay[2]);
  const double mu1 = ay[3] / (ay[1] + ay[3]);
  if (std::abs(mu0 - mu1) > kNormTolerance)
    throw ValidationError("consequence is not independent of the action: p(y=1|a=0)=" +
                          std::to_string(mu0) + ", p(y=1|a=1)=" + std::to_string(mu1));
  const double mu = ay[2] + ay[3];
  check_open_unit(mu, "mu");
  return JointDistribution(n, std::move(table), alpha, mu);
}

double JointDistribution::min_entry() const {
  return *std::min_element(table_.begin(), table_.end());
}

JointDistribution build_joint(double alpha, double mu, const ConditionalFamily& q) {
  check_open_unit(alpha, "alpha");
  check_open_unit(mu, "mu");
  const int n = q.n();
  std::vector<double> table(std::size_t{1} << n);
  const std::uint32_t width = static_cast<std::uint32_t>(q.width());
  for (int a = 0; a < 2; ++a) {
    const double pa = a ? alpha : 1.0 - alpha;
    for (int y = 0; y < 2; ++y) {
      const double py = y ? mu : 1.0 - mu;
      for (std::uint32_t m = 0; m < width; ++m) {
        const std::uint32_t x = static_cast<std::uint32_t>(a) | (m << 1) |
                                (static_cast<std::uint32_t>(y) << (n - 1));
        table[x] = pa * py * q(a, y, m);
      }
    }
  }
  return JointDistribution::from_table(n, std::move(table));
}

Table marginal(const JointDistribution& p, VarSet subset) {
  if (subset.empty()) throw std::domain_error("marginal over an empty variable set");
  if (!subset.subset_of(p.variables()))
    throw std::domain_error("marginal subset " + subset.to_string() +
                            " exceeds the model's variables");
  return Table{subset, marginalise(p.table(), p.n(), subset)};
}

ConditionalTable conditional(const JointDistribution& p, VarSet targets, VarSet givens) {
  if (targets.empty()) throw std::domain_error("conditional with no target variables");
  if (!targets.disjoint(givens))
    throw std::domain_error("conditional targets " + targets.to_string() +
                            " overlap givens " + givens.to_string());
  const VarSet both = targets | givens;
  if (!both.subset_of(p.variables()))
    throw std::domain_error("conditional variables exceed the model's variables");

  const auto joint = marginalise(p.table(), p.n(), both);
  const Projector to_t(both, targets);
  const Projector to_g(both, givens);
  const std::size_t tsize = std::size_t{1} << targets.size();
  std::vector<double> norm(std::size_t{1} << givens.size(), 0.0);
  for (std::uint32_t u = 0; u < joint.size(); ++u) norm[to_g(u)] += joint[u];
  for (double z : norm)
    if (!(z > 0.0)) throw std::domain_error("conditioning event has zero probability");

  ConditionalTable out{targets, givens, std::vector<double>(norm.size() * tsize)};
  for (std::uint32_t u = 0; u < joint.size(); ++u) {
    const std::uint32_t g = to_g(u);
    out.values[g * tsize + to_t(u)] = joint[u] / norm[g];
  }
  return out;
}

ConditionalFamily perturb_full_support(const ConditionalFamily& q, double delta) {
  if (!(delta > 0.0 && delta < 0.1))
    throw std::domain_error("perturbation weight must lie in (0, 0.1), got " +
                            std::to_string(delta));
  const double u = 1.0 / static_cast<double>(q.width());
  auto rows = q.rows();
  for (auto& r : rows)
    for (double& v : r) v = (1.0 - delta) * v + delta * u;
  return ConditionalFamily(q.n(), std::move(rows));
}

ConditionalFamily mirror(const ConditionalFamily& q) {
  const auto& r = q.rows();
  return ConditionalFamily(q.n(), {r[2], r[3], r[0], r[1]});
}

// ---------------------------------------------------------------------------

std::vector<double> factor_product(VarSet nodes, const Factor* factors, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k)
    if (!factors[k].scope.subset_of(nodes))
      throw std::domain_error("factor scope " + factors[k].scope.to_string() + " outside " +
                              nodes.to_string());
  std::vector<double> table(std::size_t{1} << nodes.size());
  table[0] = 1.0;
  std::uint32_t filled = 1;
  VarSet placed;
  for_each_var(nodes, [&](int v) {
    std::copy_n(table.begin(), filled, table.begin() + filled);
    filled *= 2;
    placed = placed.with(v);
    for (std::size_t k = 0; k < count; ++k) {
      if (factors[k].scope.empty() ? v != nodes.max_var() : factors[k].scope.max_var() != v)
        continue;
      const double* values = factors[k].values;
      double* t = table.data();
      Projector(placed, factors[k].scope)
          .visit(filled, [&](std::uint32_t u, std::uint32_t w) { t[u] *= values[w]; });
    }
  });
  if (nodes.empty())
    for (std::size_t k = 0; k < count; ++k) table[0] *= factors[k].values[0];
  return table;
}

MarginalCache::MarginalCache(const JointDistribution& p)
    : p_(&p),
      full_support_(p.has_full_support()),
      memo_(std::size_t{1} << p.n()), ready_(std::size_t{1} << p.n(), false),
      conditionals_(static_cast<std::size_t>(p.n()) << p.n()) {}

const std::vector<double>& MarginalCache::operator()(VarSet subset) {
  const std::uint32_t key = subset.mask();
  if (!ready_[key]) {
    memo_[key] = subset.empty() ? std::vector<double>{1.0}
                                : marginalise(p_->table(), p_->n(), subset);
    ready_[key] = true;
  }
  return memo_[key];
}

const std::vector<double>& MarginalCache::conditional(int child, VarSet family) {
  if (!family.contains(child) || !family.subset_of(VarSet::range(1, p_->n())))
    throw std::domain_error("conditional child outside its family");
  auto& table = conditionals_[(static_cast<std::size_t>(child - 1) << p_->n()) | family.mask()];
  if (table.empty()) {
    if (!full_support_) throw std::domain_error("conditionals require a full-support distribution");
    const auto& joint = (*this)(family);
    const auto& norm = (*this)(family.without(child));
    // Dropping the child's bit from a family index gives the parent index.
    const std::uint32_t low = (1u << position_of(family, child)) - 1u;
    table.resize(joint.size());
    for (std::uint32_t f = 0; f < joint.size(); ++f)
      table[f] = joint[f] / norm[(f & low) | ((f >> 1) & ~low)];
  }
  return table;
}

void MarginalCache::fill_all() {
  for (std::uint32_t key = 0; key < memo_.size(); ++key) (*this)(VarSet(key));
  if (!full_support_) return;
  for (std::uint32_t key = 1; key < memo_.size(); ++key)
    for_each_var(VarSet(key), [&](int child) { conditional(child, VarSet(key)); });
}

}  // namespace narrative
