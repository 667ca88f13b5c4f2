#pragma once

// Significance tests used by the evaluation report.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace iie {

enum class StatsErrorKind { degenerate_table, zero_variance, bad_input };

class StatsError : public std::invalid_argument {
 public:
  StatsError(StatsErrorKind kind, const std::string& detail);
  StatsErrorKind kind() const { return kind_; }

 private:
  StatsErrorKind kind_;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Pearson chi-squared on the 2x3 table formed by two label distributions,
// expected counts from pooled marginals, df = 2. A category empty in both
// samples is dropped and costs one degree of freedom.
TestResult chi_squared_homogeneity(const std::array<double, 3>& a, const std::array<double, 3>& b);

enum class Tail { lower, upper };

// Exact P(X <= k) (lower) or P(X >= k) (upper), X ~ Binomial(n, p0).
double binomial_one_sided(long k, long n, double p0, Tail tail);

// One-sample t-test of mean(rates) > chance, df = n - 1.
TestResult t_test_vs_chance(const std::vector<double>& rates, double chance);

}  // namespace iie
