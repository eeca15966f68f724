#pragma once

// Log-space Poisson and Binomial mass functions shared by the exact and
// thinning modules.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace mpmrf {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// ln(n!) served from a table up to max_count, std::lgamma beyond.
class LogFactorialCache {
 public:
  explicit LogFactorialCache(std::size_t max_count = 4096) : table_(max_count + 1, 0.0) {
    for (std::size_t n = 2; n <= max_count; ++n)
      table_[n] = table_[n - 1] + std::log(static_cast<double>(n));
  }

  double operator()(std::uint64_t n) const {
    if (n < table_.size()) return table_[n];
    return std::lgamma(static_cast<double>(n) + 1.0);
  }

  std::size_t max_count() const noexcept { return table_.size() - 1; }

 private:
  std::vector<double> table_;
};

inline const LogFactorialCache& log_factorial_cache() {
  static const LogFactorialCache cache;
  return cache;
}

inline double log_factorial(std::uint64_t n) { return log_factorial_cache()(n); }

inline double log_binomial_coefficient(std::uint64_t n, std::uint64_t k) {
  if (k > n) return kNegInf;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// ln Pr(Poisson(mean) = n); mean = 0 is the point mass at 0.
inline double log_poisson_pmf(std::uint64_t n, double mean) {
  if (mean == 0.0) return n == 0 ? 0.0 : kNegInf;
  return -mean + static_cast<double>(n) * std::log(mean) - log_factorial(n);
}

/// ln Pr(Binomial(trials, p) = k), with the degenerate ends p = 0 and p = 1.
inline double log_binomial_pmf(std::uint64_t k, std::uint64_t trials, double p) {
  if (k > trials) return kNegInf;
  if (p == 0.0) return k == 0 ? 0.0 : kNegInf;
  if (p == 1.0) return k == trials ? 0.0 : kNegInf;
  return log_binomial_coefficient(trials, k) + static_cast<double>(k) * std::log(p) +
         static_cast<double>(trials - k) * std::log1p(-p);
}

inline double poisson_pmf(std::uint64_t n, double mean) { return std::exp(log_poisson_pmf(n, mean)); }

inline double binomial_pmf(std::uint64_t k, std::uint64_t trials, double p) {
  return std::exp(log_binomial_pmf(k, trials, p));
}

inline double binomial_cdf(std::uint64_t k, std::uint64_t trials, double p) {
  double acc = 0.0;
  for (std::uint64_t j = 0; j <= std::min(k, trials); ++j) acc += binomial_pmf(j, trials, p);
  return std::min(acc, 1.0);
}

/// Stable ln(sum exp(x_i)); returns -inf for an empty or all -inf input.
template <typename Range>
double log_sum_exp(const Range& terms) {
  double peak = kNegInf;
  for (double x : terms) peak = std::max(peak, x);
  if (peak == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : terms) acc += std::exp(x - peak);
  return peak + std::log(acc);
}

}  // namespace mpmrf
