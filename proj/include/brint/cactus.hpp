#pragma once

// Truncated unit sausages grown from starting points (Phi), from the
// trajectories of an interlacement that hit a set (Psi), and the iterated
// cactus A^s(r, R) built from independent interlacements.

#include <optional>
#include <string>
#include <vector>

#include "brint/capacity.hpp"
#include "brint/interlacement.hpp"
#include "brint/stats.hpp"

namespace brint {

struct CactusPath {
  std::uint64_t id = 0;  // trajectory id (start index for phi, sample id for psi)
  Trajectory path;
  double duration = 0.0;
  bool exited = false;  // stopped by the exit of B(start, R/2) rather than the time cap
};

struct CactusSet {
  int d = 5;
  int generation = 1;
  double scale_R = 0.0;
  double c0 = 0.0;
  std::vector<CactusPath> paths;

  bool empty() const { return paths.empty(); }
  std::size_t n_segments() const;
  /// Unit-radius capsules of every joined segment (balls for isolated points).
  std::vector<Primitive> sausages() const;
  /// Union shape, nullptr when empty.
  std::shared_ptr<PrimitiveUnion> shape() const;
};

/// Each path runs until min(c0 R^2, T_{B(start, R/2)}); the last step is cut at
/// the time cap or at the sphere, so every segment lies in B(start, R/2).
CactusSet phi(const std::vector<Point>& starts, double R, double c0, const SimParams& sim, const RngSpec& rng);

/// First sampled point of each trajectory inside A, in trajectory order.
std::vector<std::pair<std::uint64_t, Point>> first_hits(const WindowSample& s, const Shape& A);
CactusSet psi(const WindowSample& s, const Shape& A, double R, double c0, const SimParams& sim, const RngSpec& rng);

struct CactusGeneration {
  CactusSet set;
  std::size_t window_trajectories = 0;  // sampled for this generation
  std::size_t kept_after_annulus = 0;
  std::size_t hits = 0;
  RngSpec seed;
};

/// A^1 from one path started at x after it leaves the open ball B(0, r_in);
/// A^k = Psi(omega^(k) restricted to paths avoiding B(0, r_in), A^{k-1}, R).
/// omega^(k) is drawn only after A^{k-1} is complete, from rng.child(k).
std::vector<CactusGeneration> iterate_cactus(const Point& x, double r_in, double R, int s, double alpha,
                                             double c0, const SimParams& sim, const RngSpec& rng);

struct CactusExperimentConfig {
  int d = 5;
  std::vector<int> s_values{1};
  std::vector<int> N_values{4};
  std::vector<double> R_values{4, 8, 16};
  std::size_t replicas = 200;
  double alpha = 1e-3;  // interlacement level for s >= 2
  double r_in = 2.0;    // inner radius for s >= 2
  double c0 = 0.0;      // 0: estimate as the 0.01 exit-time quantile
  std::size_t c0_samples = 100'000;
  SimParams sim;        // step_h, n_walkers for the capacity estimates
  std::size_t bounds_max_voxels = 0;  // 0 disables variational bounds
  double voxel_spacing = 0.0;         // 0: min(0.25, R/64)
};

struct CactusRow {
  int d, s, N;
  double R;
  std::size_t replica;
  double cap_mc, cap_se;
  std::optional<double> grid_lower, grid_upper;
  std::size_t n_paths, n_segments;
  double mean_duration;
};

struct CactusFit {
  std::string kind;  // "R" (fixed s, N) or "N" (fixed s, R)
  int s;
  double fixed;      // the fixed N or R
  double exponent, r2;
};

struct CactusSummary {
  int d, s, N;
  double R;
  double mean_cap, se_cap, rel_var, ball_ratio;  // ball_ratio = mean / cap(B((s+1)R))
};

struct CactusExperimentResult {
  double c0 = 0.0;
  std::vector<CactusRow> rows;
  std::vector<CactusSummary> summaries;
  std::vector<CactusFit> fits;
};

/// Starts (s = 1) are drawn uniformly in B(0, R).
CactusExperimentResult cactus_capacity_experiment(const CactusExperimentConfig& cfg, const RngSpec& rng,
                                                  Exec exec = Exec::parallel);

}  // namespace brint
