#pragma once

// Small statistics toolbox used by experiments and tests.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace brint {

/// Welford accumulator; merge() combines partial results in a fixed order.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& o);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased sample variance
  double std_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);
/// Fit of log y against log x; all inputs must be positive.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

/// Half-width of the 95% Wilson interval for k successes in n trials.
double binomial_ci95(std::size_t k, std::size_t n);
double binomial_sigma(double p, std::size_t n);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Empirical quantile by linear interpolation between order statistics.
double quantile(std::vector<double> v, double q);

/// Pool-adjacent-violators fit; nondecreasing when `increasing`, else nonincreasing.
std::vector<double> isotonic_regression(std::span<const double> y, std::span<const double> w,
                                        bool increasing);

/// Linear interpolation of the first x where the piecewise linear curve through
/// (x_i, y_i) crosses `level`; nullopt when the curve does not bracket it.
std::optional<double> interpolate_crossing(std::span<const double> x, std::span<const double> y,
                                           double level);

}  // namespace brint
