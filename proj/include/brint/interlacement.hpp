#pragma once

// Brownian interlacements restricted to a compact window through the local
// picture: a Poisson number of forward paths started from the equilibrium
// measure of B(K, r), each carrying an i.i.d. uniform level label.

#include <iosfwd>
#include <vector>

#include "brint/brownian.hpp"
#include "brint/capacity.hpp"
#include "brint/core.hpp"

namespace brint {

/// window: Gaussian steps only near B(K, r); long excursions and returns from
///   far away are resolved exactly, and the path ends when it escapes for good.
/// escape: full-resolution steps until |x - center| >= rho_esc.
enum class PathMode { window, escape };

struct LabeledTrajectory {
  double label = 0.0;
  Trajectory path;
  std::uint64_t id = 0;  // index in the originating sample, stable under restriction
};

struct WindowSample {
  BoxRegion window;
  double radius_r = 1.0;
  CapacityEstimate enlarged_cap;
  double alpha_max = 0.0;
  std::vector<LabeledTrajectory> trajectories;
  double escape_radius = 0.0;
  SimParams sim;
  PathMode mode = PathMode::window;

  std::size_t size() const { return trajectories.size(); }
};

struct WindowConfig {
  BoxRegion window;
  double r = 1.0;
  double alpha_max = 0.0;
  SimParams sim;
  PathMode mode = PathMode::window;
  /// escape mode only: after escaping at distance D, continue from a fresh
  /// equilibrium point with probability (circumradius / D)^{d-2}.
  bool reentry = false;
};

/// Shares one capacity estimate of B(K, r) between many replicas.
class WindowSampler {
 public:
  /// Estimates cap(B(K, r)) with cap_rng (closed form for Euclidean windows).
  WindowSampler(WindowConfig cfg, const RngSpec& cap_rng);
  WindowSampler(WindowConfig cfg, CapacityEstimate cap);

  WindowSample sample(const RngSpec& rng, Exec exec = Exec::serial) const;
  /// Single forward path from `start`, as used inside sample().
  Trajectory forward_path(const Point& start, Rng& rng) const;

  const CapacityEstimate& enlarged_cap() const { return cap_; }
  const WindowConfig& config() const { return cfg_; }
  const SimParams& sim() const { return sim_; }
  double active_margin() const { return delta_; }

 private:
  void init();

  WindowConfig cfg_;
  CapacityEstimate cap_;
  SimParams sim_;
  ShapePtr enlarged_;
  WosConfig wos_;
  double delta_ = 0.0;
};

/// Capacity of B(K, r): closed form for Euclidean balls, walk-on-spheres otherwise.
CapacityEstimate enlarged_capacity(const BoxRegion& K, double r, const SimParams& sim, const RngSpec& rng);

WindowSample sample_window(const BoxRegion& K, double r, double alpha_max, const SimParams& sim,
                           const RngSpec& rng, PathMode mode = PathMode::window);

WindowSample restrict_level(const WindowSample& s, double alpha);
WindowSample superpose(const WindowSample& s1, const WindowSample& s2);
/// True iff no trajectory of level <= alpha passes within r of K0.
bool vacancy_indicator(const WindowSample& s, double alpha, const BoxRegion& K0);
/// Trajectories whose path never enters the open ball B(0, r_in).
WindowSample restrict_annulus(const WindowSample& s, double r_in);
/// Geometry scaled by lambda, radius lambda r, levels scaled by lambda^{2-d}.
WindowSample scaling_transport(const WindowSample& s, double lambda);

/// Minimum Euclidean distance between the polyline and the region.
double path_region_distance(const Trajectory& t, const BoxRegion& K);
double segment_box_distance2(const Point& a, const Point& b, const Point& c, double hw);
/// Smallest |x| over the polyline.
double path_min_norm(const Trajectory& t);

/// Line-based text format, exact (hex-float) coordinates.
void write_window_sample(std::ostream& os, const WindowSample& s);
WindowSample read_window_sample(std::istream& is);

}  // namespace brint
