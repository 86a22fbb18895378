#pragma once

// Exact tabular probability over n binary variables x_1..x_n.
//
// Assignments of a variable set are encoded as integers with the lowest
// variable in the least significant bit. For the full joint, x_1 (the action)
// is bit 0 and x_n (the consequence) is bit n-1.

#include <array>
#include <cstdint>
#include <vector>

#include "narrative/errors.hpp"
#include "narrative/varset.hpp"

namespace narrative {

inline constexpr double kNormTolerance = 1e-12;

/// Encodes a full assignment (x_1..x_n) into its table index.
std::uint32_t encode(const std::vector<int>& bits);
/// Inverse of encode for an n-variable assignment.
std::vector<int> decode(std::uint32_t index, int n);

/// Probability table over `vars`, indexed by compact assignment.
struct Table {
  VarSet vars;
  std::vector<double> values;

  double sum() const;
};

/// p(targets | givens). Entry for (given g, target t) sits at
/// g * 2^|targets| + t; each given row sums to one.
struct ConditionalTable {
  VarSet targets;
  VarSet givens;
  std::vector<double> values;

  double operator()(std::uint32_t given, std::uint32_t target) const {
    return values[(given << targets.size()) | target];
  }
};

/// Conditional distribution over the middle variables x_2..x_{n-1} for each
/// (a, y) pair. Rows are ordered (0,0),(0,1),(1,0),(1,1); within a row the
/// middle assignment is indexed with x_2 least significant.
class ConditionalFamily {
 public:
  ConditionalFamily(int n, std::array<std::vector<double>, 4> rows);

  /// n = 3 shorthand from p_ay = p(x_2 = 1 | a, y).
  static ConditionalFamily from_x2(double p00, double p01, double p10, double p11);
  static ConditionalFamily uniform(int n);

  int n() const { return n_; }
  std::size_t width() const { return rows_[0].size(); }
  const std::vector<double>& row(int a, int y) const { return rows_[2 * a + y]; }
  const std::array<std::vector<double>, 4>& rows() const { return rows_; }
  double operator()(int a, int y, std::uint32_t middle) const {
    return rows_[2 * a + y][middle];
  }
  /// p(x_2 = 1 | a, y), marginalising any further middle variables.
  double x2_prob(int a, int y) const;
  double min_entry() const;

  bool operator==(const ConditionalFamily&) const = default;

 private:
  int n_;
  std::array<std::vector<double>, 4> rows_;
};

/// A joint distribution over n binary variables whose action x_1 and
/// consequence x_n are independent: p(x_1=1) = alpha, p(x_n=1 | x_1) = mu.
class JointDistribution {
 public:
  /// Validates normalisation, non-negativity and the action/consequence
  /// independence constraint; alpha and mu are read off the table.
  static JointDistribution from_table(int n, std::vector<double> table);

  int n() const { return n_; }
  double alpha() const { return alpha_; }
  double mu() const { return mu_; }
  VarSet variables() const { return VarSet::range(1, n_); }
  const std::vector<double>& table() const { return table_; }
  double operator[](std::uint32_t index) const { return table_[index]; }
  double min_entry() const;
  bool has_full_support() const { return min_entry() > 0.0; }

 private:
  JointDistribution(int n, std::vector<double> table, double alpha, double mu)
      : n_(n), table_(std::move(table)), alpha_(alpha), mu_(mu) {}

  int n_;
  std::vector<double> table_;
  double alpha_;
  double mu_;
};

/// p(x) = p(a) p(y) q(x_2..x_{n-1} | a, y) with p(a=1) = alpha, p(y=1) = mu.
JointDistribution build_joint(double alpha, double mu, const ConditionalFamily& q);

Table marginal(const JointDistribution& p, VarSet subset);

/// Requires the givens' marginal to be strictly positive.
ConditionalTable conditional(const JointDistribution& p, VarSet targets, VarSet givens);

/// (1 - delta) q + delta * uniform, row by row.
ConditionalFamily perturb_full_support(const ConditionalFamily& q, double delta);

/// A table over `scope`, indexed like a marginal over it.
struct Factor {
  VarSet scope;
  const double* values;
};

/// Product of factors over `nodes`, each factor's scope a subset of `nodes`.
/// The table grows one variable at a time and each factor is applied once
/// its highest variable is present, so low-scoped factors touch fewer cells.
std::vector<double> factor_product(VarSet nodes, const Factor* factors, std::size_t count);

/// Swaps the roles of a = 0 and a = 1.
ConditionalFamily mirror(const ConditionalFamily& q);

/// Lazily memoised subset marginals of one joint distribution. Holds a
/// reference; the distribution must outlive the cache. Not thread-safe
/// unless filled.
class MarginalCache {
 public:
  explicit MarginalCache(const JointDistribution& p);

  const JointDistribution& joint() const { return *p_; }
  bool full_support() const { return full_support_; }
  /// Marginal table over `subset` (an empty subset yields {1.0}).
  const std::vector<double>& operator()(VarSet subset);
  /// p(x_child | rest of family) over `family`, indexed like marginals(family).
  /// Requires full support.
  const std::vector<double>& conditional(int child, VarSet family);
  /// Computes every marginal and conditional up front. Lookups afterwards
  /// only read, so the cache can then be shared between threads.
  void fill_all();

 private:
  const JointDistribution* p_;
  bool full_support_;
  std::vector<std::vector<double>> memo_;
  std::vector<bool> ready_;
  std::vector<std::vector<double>> conditionals_;
};

}  // namespace narrative
