#pragma once

// Forward Brownian paths (generator Delta/2), ball exit times and renewal counts.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "brint/core.hpp"
#include "brint/rng.hpp"

namespace brint {

enum class Termination { escaped, max_steps, stopped };

/// Discretized path. Points are stored flat; `breaks` lists indices i where the
/// straight segment (i-1, i) is not part of the path (an exact long-range jump
/// was taken there instead of Gaussian steps).
struct Trajectory {
  int dim = 0;
  double step_h = 0.0;
  std::vector<double> xs;
  std::vector<std::uint32_t> breaks;
  Termination termination = Termination::stopped;
  double escape_radius = 0.0;
  int stop_rule_id = 0;

  Trajectory() = default;
  Trajectory(int d, double h) : dim(d), step_h(h) {}

  std::size_t size() const { return dim ? xs.size() / std::size_t(dim) : 0; }
  bool empty() const { return xs.empty(); }
  Point point(std::size_t i) const {
    return Point::from_span({xs.data() + i * std::size_t(dim), std::size_t(dim)});
  }
  std::span<const double> raw(std::size_t i) const { return {xs.data() + i * std::size_t(dim), std::size_t(dim)}; }
  void push(const Point& p) { xs.insert(xs.end(), p.coords().begin(), p.coords().end()); }
  void push_break(const Point& p) {
    breaks.push_back(static_cast<std::uint32_t>(size()));
    push(p);
  }
  /// True when segment (i, i+1) belongs to the path.
  bool segment_joined(std::size_t i) const;
  Point front() const { return point(0); }
  Point back() const { return point(size() - 1); }
  /// Copy keeping the first `n` points.
  Trajectory prefix(std::size_t n) const;
};

struct StopRule {
  enum class Kind { exit_ball, fixed_time, escape_radius };
  Kind kind = Kind::fixed_time;
  Point center;
  double radius = 0.0;
  double T = 0.0;
  std::size_t max_steps = 0;  // 0 means unlimited (exit_ball / fixed_time only)

  static StopRule exit_ball(const Point& c, double R, std::size_t max_steps = 0);
  static StopRule fixed_time(double T);
  static StopRule escape(const Point& c, double rho_esc, std::size_t max_steps);
  int id() const { return static_cast<int>(kind); }
};

Trajectory sample_path(const Point& start, double step_h, const StopRule& stop, const RngSpec& rng);

/// Adds an N(0, h I) increment to p.
void gaussian_step(Point& p, double sqrt_h, Rng& rng);

/// Exact law of the exit time of the unit ball from its center,
/// P[T > t] = sum_k c_k exp(-j_k^2 t / 2) with j_k the zeros of J_{d/2-1}.
class ExitTimeLaw {
 public:
  static const ExitTimeLaw& get(int d);
  explicit ExitTimeLaw(int d);

  double survival(double t) const;
  double sample(Rng& rng) const;
  /// Exact quantile P[T <= t_q] = q.
  double inverse_cdf(double q) const;
  double mean() const { return 1.0 / d_; }
  int dim() const { return d_; }

 private:
  double invert_survival(double s) const;

  int d_;
  std::vector<double> j2_, coef_;
  std::vector<double> grid_t_, grid_s_;
  double tail_t_ = 0.0, tail_s_ = 0.0;
};

/// Exit time of B(center, R) starting from the center. `step_h` = 0 selects the
/// exact law; otherwise a Gaussian-step path is run and the first sampled
/// point outside the ball ends it.
double sample_exit_time(int d, double R, double step_h, Rng& rng);

struct RenewalRecord {
  double t = 0.0;
  std::uint64_t count = 0;
  std::vector<double> tau_times;
};

/// Chains unit-ball exits from the successive exit points until time t is reached.
RenewalRecord renewal_count(int d, double t, double step_h, const RngSpec& rng);

/// Exit-time samples of B(0, R) from the origin, replica-seeded and thread-count independent.
std::vector<double> exit_time_samples(int d, double R, std::size_t n, double step_h, const RngSpec& rng);

/// Empirical q-quantile of T_{B(0,1/2)}; requires n_samples >= 100.
double exit_time_quantile(int d, double q, std::size_t n_samples, const RngSpec& rng, double step_h = 0.0);

}  // namespace brint
