#include "brint/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "brint/core.hpp"

namespace brint {

void RunningStats::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / double(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double n = double(n_ + o.n_);
  const double delta = o.mean_ - mean_;
  mean_ += delta * double(o.n_) / n;
  m2_ += o.m2_ + delta * delta * double(n_) * double(o.n_) / n;
  n_ += o.n_;
}

double RunningStats::variance() const { return n_ > 1 ? m2_ / double(n_ - 1) : 0.0; }

double RunningStats::std_error() const { return n_ > 1 ? std::sqrt(variance() / double(n_)) : 0.0; }

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("linear_fit needs >= 2 paired points");
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("linear_fit: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (x.size() > 2) f.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
  return f;
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return linear_fit(lx, ly);
}

double binomial_ci95(std::size_t k, std::size_t n) {
  if (n == 0) return 1.0;
  const double z = 1.959963984540054;
  const double p = double(k) / double(n);
  const double nn = double(n);
  const double denom = 1.0 + z * z / nn;
  return z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
}

double binomial_sigma(double p, std::size_t n) {
  return n == 0 ? 1.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / double(n));
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_statistic on empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
  }
  return d;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw DomainError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0,1]");
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double t = pos - double(lo);
  return v[lo] * (1.0 - t) + v[hi] * t;
}

std::vector<double> isotonic_regression(std::span<const double> y, std::span<const double> w,
                                        bool increasing) {
  const std::size_t n = y.size();
  if (!w.empty() && w.size() != n) throw DomainError("isotonic_regression weight size mismatch");
  struct Block {
    double value, weight;
    std::size_t len;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    blocks.push_back({increasing ? y[i] : -y[i], wi, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value > blocks.back().value) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double tw = a.weight + b.weight;
      a.value = tw > 0 ? (a.value * a.weight + b.value * b.weight) / tw : 0.5 * (a.value + b.value);
      a.weight = tw;
      a.len += b.len;
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (const auto& b : blocks) out.insert(out.end(), b.len, increasing ? b.value : -b.value);
  return out;
}

std::optional<double> interpolate_crossing(std::span<const double> x, std::span<const double> y,
                                           double level) {
  if (x.size() != y.size()) throw DomainError("interpolate_crossing size mismatch");
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = y[i] - level, b = y[i + 1] - level;
    if (a == 0.0) return x[i];
    if ((a < 0.0) != (b < 0.0) || b == 0.0) {
      if (b == 0.0) return x[i + 1];
      const double t = a / (a - b);
      return x[i] + t * (x[i + 1] - x[i]);
    }
  }
  if (!x.empty() && y.back() == level) return x.back();
  return std::nullopt;
}

}  // namespace brint
