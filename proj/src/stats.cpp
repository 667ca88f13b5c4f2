#include "iie/stats.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace iie {

StatsError::StatsError(StatsErrorKind kind, const std::string& detail) : std::invalid_argument(detail), kind_(kind) {}

TestResult chi_squared_homogeneity(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double ta = std::accumulate(a.begin(), a.end(), 0.0);
  double tb = std::accumulate(b.begin(), b.end(), 0.0);
  for (double v : a)
    if (v < 0) throw StatsError(StatsErrorKind::bad_input, "negative count");
  for (double v : b)
    if (v < 0) throw StatsError(StatsErrorKind::bad_input, "negative count");
  if (ta <= 0 || tb <= 0) throw StatsError(StatsErrorKind::bad_input, "empty sample");
  double total = ta + tb;
  double stat = 0;
  int used = 0;
  for (int c = 0; c < 3; ++c) {
    double col = a[c] + b[c];
    if (col <= 0) continue;
    ++used;
    double ea = ta * col / total, eb = tb * col / total;
    stat += (a[c] - ea) * (a[c] - ea) / ea + (b[c] - eb) * (b[c] - eb) / eb;
  }
  if (used < 2) throw StatsError(StatsErrorKind::degenerate_table, "fewer than two categories in use");
  boost::math::chi_squared dist(used - 1);
  return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

double binomial_one_sided(long k, long n, double p0, Tail tail) {
  if (n < 0 || k < 0 || k > n) throw StatsError(StatsErrorKind::bad_input, "need 0 <= k <= n");
  if (!(p0 > 0 && p0 < 1)) throw StatsError(StatsErrorKind::bad_input, "p0 outside (0, 1)");
  boost::math::binomial dist(static_cast<double>(n), p0);
  if (tail == Tail::lower) return boost::math::cdf(dist, static_cast<double>(k));
  if (k == 0) return 1.0;
  return boost::math::cdf(boost::math::complement(dist, static_cast<double>(k - 1)));
}

TestResult t_test_vs_chance(const std::vector<double>& rates, double chance) {
  if (rates.size() < 2) throw StatsError(StatsErrorKind::bad_input, "need at least two rates");
  double n = static_cast<double>(rates.size());
  double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / n;
  double ss = 0;
  for (double r : rates) ss += (r - mean) * (r - mean);
  double sd = std::sqrt(ss / (n - 1));
  // Values that are all equal can leave rounding noise in the mean.
  if (sd <= 1e-12 * std::max(1.0, std::fabs(mean))) throw StatsError(StatsErrorKind::zero_variance, "rates have zero variance");
  double t = (mean - chance) / (sd / std::sqrt(n));
  boost::math::students_t dist(n - 1);
  return {t, boost::math::cdf(boost::math::complement(dist, t))};
}

}  // namespace iie
