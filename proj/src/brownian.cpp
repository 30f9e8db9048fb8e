#include "brint/brownian.hpp"

#include <algorithm>
#include <array>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <memory>
#include <mutex>

#include "brint/parallel.hpp"
#include "brint/stats.hpp"

namespace brint {

bool Trajectory::segment_joined(std::size_t i) const {
  if (i + 1 >= size()) return false;
  return !std::binary_search(breaks.begin(), breaks.end(), static_cast<std::uint32_t>(i + 1));
}

Trajectory Trajectory::prefix(std::size_t n) const {
  Trajectory t(dim, step_h);
  n = std::min(n, size());
  t.xs.assign(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n * std::size_t(dim)));
  for (auto b : breaks) {
    if (b < n) t.breaks.push_back(b);
  }
  t.termination = Termination::stopped;
  t.stop_rule_id = stop_rule_id;
  return t;
}

StopRule StopRule::exit_ball(const Point& c, double R, std::size_t max_steps) {
  if (!(R > 0.0)) throw DomainError("exit_ball radius must be positive");
  StopRule s;
  s.kind = Kind::exit_ball;
  s.center = c;
  s.radius = R;
  s.max_steps = max_steps;
  return s;
}

StopRule StopRule::fixed_time(double T) {
  if (!(T >= 0.0)) throw DomainError("fixed_time horizon must be nonnegative");
  StopRule s;
  s.kind = Kind::fixed_time;
  s.T = T;
  return s;
}

StopRule StopRule::escape(const Point& c, double rho_esc, std::size_t max_steps) {
  if (!(rho_esc > 0.0)) throw DomainError("escape radius must be positive");
  if (max_steps == 0) throw DomainError("escape rule needs a step budget");
  StopRule s;
  s.kind = Kind::escape_radius;
  s.center = c;
  s.radius = rho_esc;
  s.max_steps = max_steps;
  return s;
}

void gaussian_step(Point& p, double sqrt_h, Rng& rng) {
  for (int i = 0; i < p.dim(); ++i) p[i] += sqrt_h * rng.normal();
}

Trajectory sample_path(const Point& start, double step_h, const StopRule& stop, const RngSpec& spec) {
  if (!(step_h > 0.0)) throw DomainError("step_h must be positive");
  const int d = start.dim();
  Rng rng(spec);
  Trajectory tr(d, step_h);
  tr.stop_rule_id = stop.id();
  tr.push(start);
  const double sh = std::sqrt(step_h);
  Point x = start;

  if (stop.kind == StopRule::Kind::fixed_time) {
    const auto n = static_cast<std::size_t>(std::ceil(stop.T / step_h - 1e-12));
    tr.xs.reserve((n + 1) * std::size_t(d));
    for (std::size_t k = 0; k < n; ++k) {
      gaussian_step(x, sh, rng);
      tr.push(x);
    }
    tr.termination = Termination::stopped;
    return tr;
  }

  const double r2 = stop.radius * stop.radius;
  const bool escape = stop.kind == StopRule::Kind::escape_radius;
  std::size_t steps = 0;
  while (escape ? dist2(x, stop.center) < r2 : dist2(x, stop.center) <= r2) {
    if (stop.max_steps && steps >= stop.max_steps) {
      tr.termination = Termination::max_steps;
      return tr;
    }
    gaussian_step(x, sh, rng);
    tr.push(x);
    ++steps;
  }
  if (escape) {
    tr.termination = Termination::escaped;
    tr.escape_radius = stop.radius;
  } else {
    tr.termination = Termination::stopped;
  }
  return tr;
}

ExitTimeLaw::ExitTimeLaw(int d) : d_(d) {
  require_dim(d);
  const double nu = d / 2.0 - 1.0;
  constexpr int kTerms = 2000;
  const double norm = std::pow(2.0, nu - 1.0) * std::tgamma(nu + 1.0);
  j2_.reserve(kTerms);
  coef_.reserve(kTerms);
  for (int k = 1; k <= kTerms; ++k) {
    const double j = boost::math::cyl_bessel_j_zero(nu, k);
    j2_.push_back(j * j);
    coef_.push_back(std::pow(j, nu - 1.0) / (norm * boost::math::cyl_bessel_j(nu + 1.0, j)));
  }
  // Past tail_t_ the leading exponential carries everything to 1e-13 relative.
  tail_t_ = 2.0 * (std::log(std::abs(coef_[1] / coef_[0])) + 30.0) / (j2_[1] - j2_[0]);
  tail_s_ = coef_[0] * std::exp(-0.5 * j2_[0] * tail_t_);
  constexpr int kGrid = 1 << 15;
  grid_t_.resize(kGrid + 1);
  grid_s_.resize(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) {
    const double t = tail_t_ * double(i) / kGrid;
    grid_t_[i] = t;
    grid_s_[i] = i == 0 ? 1.0 : std::min(1.0, survival(t));
    if (i > 0) grid_s_[i] = std::min(grid_s_[i], grid_s_[i - 1]);
  }
}

const ExitTimeLaw& ExitTimeLaw::get(int d) {
  require_dim(d);
  static std::array<std::unique_ptr<ExitTimeLaw>, kMaxDim + 1> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[static_cast<std::size_t>(d)];
  if (!slot) slot = std::make_unique<ExitTimeLaw>(d);
  return *slot;
}

double ExitTimeLaw::survival(double t) const {
  if (t <= 0.0) return 1.0;
  // The series needs terms until the exponent is negligible; when the available
  // zeros run out first, P[T <= t] is far below double resolution.
  if (0.5 * j2_.back() * t < 60.0) return 1.0;
  double s = 0.0;
  for (std::size_t k = 0; k < j2_.size(); ++k) {
    const double e = 0.5 * j2_[k] * t;
    s += coef_[k] * std::exp(-e);
    if (e > 60.0) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

double ExitTimeLaw::invert_survival(double s) const {
  if (s >= 1.0) return 0.0;
  if (s <= tail_s_) return -2.0 * std::log(s / coef_[0]) / j2_[0];
  // grid_s_ is nonincreasing; find the first index with grid_s_ < s.
  auto it = std::upper_bound(grid_s_.begin(), grid_s_.end(), s, std::greater<>());
  const auto i = static_cast<std::size_t>(it - grid_s_.begin());
  if (i == 0) return 0.0;
  if (i >= grid_s_.size()) return tail_t_;
  const double s0 = grid_s_[i - 1], s1 = grid_s_[i];
  const double w = s0 > s1 ? (s0 - s) / (s0 - s1) : 0.0;
  return grid_t_[i - 1] + w * (grid_t_[i] - grid_t_[i - 1]);
}

double ExitTimeLaw::sample(Rng& rng) const { return invert_survival(rng.uniform_pos()); }

double ExitTimeLaw::inverse_cdf(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  return invert_survival(1.0 - q);
}

double sample_exit_time(int d, double R, double step_h, Rng& rng) {
  if (!(R > 0.0)) throw DomainError("exit radius must be positive");
  if (step_h <= 0.0) return R * R * ExitTimeLaw::get(d).sample(rng);
  Point x(d);
  const double sh = std::sqrt(step_h), r2 = R * R;
  std::size_t steps = 0;
  while (x.norm2() <= r2) {
    gaussian_step(x, sh, rng);
    ++steps;
  }
  return double(steps) * step_h;
}

RenewalRecord renewal_count(int d, double t, double step_h, const RngSpec& spec) {
  require_dim(d);
  if (!(t >= 0.0)) throw DomainError("renewal horizon must be nonnegative");
  RenewalRecord rec;
  rec.t = t;
  if (t == 0.0) return rec;
  Rng rng(spec);
  double tau = 0.0;
  if (step_h <= 0.0) {
    // Exit time and exit position are independent for a ball started at its
    // center, so the times alone form the renewal sequence.
    const ExitTimeLaw& law = ExitTimeLaw::get(d);
    while (tau < t) {
      tau += law.sample(rng);
      rec.tau_times.push_back(tau);
    }
  } else {
    const double sh = std::sqrt(step_h);
    Point x(d);
    while (tau < t) {
      const Point c = x;
      std::size_t steps = 0;
      while (dist2(x, c) <= 1.0) {
        gaussian_step(x, sh, rng);
        ++steps;
      }
      tau += double(steps) * step_h;
      rec.tau_times.push_back(tau);
    }
  }
  rec.count = rec.tau_times.size();
  return rec;
}

std::vector<double> exit_time_samples(int d, double R, std::size_t n, double step_h, const RngSpec& spec) {
  require_dim(d);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> out(n);
  if (step_h <= 0.0) ExitTimeLaw::get(d);
  for_each_index(chunks, [&](std::size_t c) {
    Rng rng(spec.child(c));
    const std::size_t hi = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < hi; ++i) out[i] = sample_exit_time(d, R, step_h, rng);
  });
  return out;
}

double exit_time_quantile(int d, double q, std::size_t n_samples, const RngSpec& rng, double step_h) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  if (n_samples < 100) throw DomainError("exit_time_quantile needs at least 100 samples");
  return quantile(exit_time_samples(d, 0.5, n_samples, step_h, rng), q);
}

}  // namespace brint
