#pragma once

// Voxelized interlacement sausages and crossing events.
//
// A grid stores, per cell, the smallest level label of a trajectory whose
// r-sausage covers the cell center; the cell is occupied at level alpha iff
// that label is <= alpha. One rasterization therefore serves every level of
// a label-coupled sample, and the level at which a crossing appears or
// disappears can be computed exactly per replica.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "brint/interlacement.hpp"
#include "brint/stats.hpp"

namespace brint {

/// Cubic grid of (2n+1)^d cells centered at c + a (i - n). Cells hold the rank
/// of their lowest covering level in the sorted table `levels`.
struct OccupancyGrid {
  static constexpr std::uint32_t kVacant = 0xFFFFFFFFu;

  int d = 3;
  Point center;
  double spacing = 1.0;
  int n = 0;  // half extent in cells
  std::vector<std::uint32_t> cell;
  std::vector<double> levels;  // nondecreasing

  OccupancyGrid() = default;
  OccupancyGrid(const Point& c, double a, int half_cells);
  /// Grid with explicit per-cell labels (+inf for never covered).
  static OccupancyGrid from_labels(const Point& c, double a, int half_cells, const std::vector<double>& labels);

  int side() const { return 2 * n + 1; }
  std::size_t size() const { return cell.size(); }
  double label(std::size_t idx) const;
  std::size_t index(const std::array<int, kMaxDim>& i) const;
  std::array<int, kMaxDim> coords(std::size_t idx) const;
  Point cell_center(std::size_t idx) const;
  bool occupied(std::size_t idx, double alpha) const { return label(idx) <= alpha; }
  /// Bit view at one level.
  std::vector<std::uint8_t> occupied_bits(double alpha) const;
  double occupied_fraction(double alpha) const;
  /// l-infinity cell distance from the center cell.
  int shell(std::size_t idx) const;
};

/// Rasterizes trajectories of level <= alpha over the cube `region` (Euclidean
/// regions use their bounding cube). Requires spacing <= r/2.
OccupancyGrid rasterize(const WindowSample& s, double alpha, const BoxRegion& region, double spacing,
                        Exec exec = Exec::serial);
/// Same covering rule on a fresh grid without the spacing restriction (used
/// for the unit lattice).
void rasterize_into(OccupancyGrid& g, const WindowSample& s, double alpha, Exec exec = Exec::serial);
/// Cell-by-cell reference for the covering rule (slow).
void rasterize_reference(OccupancyGrid& g, const WindowSample& s, double alpha);

enum class CrossingMode { vacant_annulus, lattice, slab, occupied };
std::string to_string(CrossingMode m);
CrossingMode parse_crossing_mode(const std::string& s);
bool is_vacant_mode(CrossingMode m);

/// Annulus in cell units: sources are cells with shell <= inner (lattice mode:
/// shell == inner), targets are cells with shell == outer, and the search is
/// confined to shell <= outer (slab mode: also |i_j - n| <= 1 for j >= 2).
struct CrossingGeometry {
  int inner = 0;
  int outer = 0;
};

/// Crossing geometry of the annulus B_inf(c, L) -> dB_inf(c, 2L) on grid g.
/// Lattice mode uses S(c, L-1) -> S(c, 2L) on the unit lattice.
CrossingGeometry annulus_geometry(const OccupancyGrid& g, double L, CrossingMode mode);

/// Flood fill from the sources through face-adjacent open cells.
bool crossing_event(const OccupancyGrid& g, CrossingMode mode, const CrossingGeometry& geo, double alpha);
/// Exact critical level of the replica: vacant modes return the supremum of
/// levels with a vacant crossing (+inf when the limit exceeds every label),
/// occupied modes the infimum of levels with an occupied crossing (+inf if none).
/// Union-find over cells in label order.
double critical_level(const OccupancyGrid& g, CrossingMode mode, const CrossingGeometry& geo);
/// Crossing at alpha according to a critical level.
bool crossing_from_level(double level, double alpha, CrossingMode mode);

/// Lattice points whose unit l-inf box meets the polyline, made nearest
/// neighbour by changing one coordinate at a time (increasing index) at
/// diagonal steps.
std::vector<std::array<long, kMaxDim>> discretize_path(const std::vector<Point>& poly);

struct CrossingEstimate {
  double alpha = 0.0;
  double L = 0.0;
  CrossingMode mode = CrossingMode::vacant_annulus;
  double p_hat = 0.0;
  double ci95 = 0.0;
  std::size_t n_replicas = 0;
  std::size_t successes = 0;
};

/// Geometry and resolution of a crossing experiment. Lengths are absolute.
struct CrossingSetup {
  int d = 3;
  double r = 1.0;
  double L = 16.0;
  CrossingMode mode = CrossingMode::vacant_annulus;
  double spacing = 0.0;  // 0: r/2 (the lattice mode always uses 1)
  SimParams sim = [] {
    SimParams s;
    s.step_h = 0.0;  // selects sqrt(h d) = r
    return s;
  }();

  CrossingSetup resolved() const;
  /// Window B_inf(0, 2L) containing the annulus.
  BoxRegion window() const;
};

struct ScanResult {
  std::vector<double> alphas;
  std::vector<CrossingEstimate> curve;
  std::vector<double> p_iso;
  std::optional<double> alpha_half;
  std::vector<double> levels;  // per-replica critical levels
  CapacityEstimate window_cap;
};

CrossingEstimate crossing_probability(double alpha, const CrossingSetup& setup, std::size_t M, const RngSpec& rng,
                                      Exec exec = Exec::parallel);
/// Per-replica critical levels for samples drawn at alpha_max.
std::vector<double> replica_levels(const CrossingSetup& setup, double alpha_max, std::size_t M, const RngSpec& rng,
                                   CapacityEstimate* cap_out = nullptr, Exec exec = Exec::parallel);
ScanResult threshold_scan(const std::vector<double>& alpha_grid, const CrossingSetup& setup, std::size_t M,
                          const RngSpec& rng, Exec exec = Exec::parallel);
/// Curve from critical levels, monotone smoothing and the interpolated level at p = 1/2.
ScanResult scan_from_levels(const std::vector<double>& alpha_grid, const CrossingSetup& setup,
                            std::vector<double> levels);

struct ScalingReport {
  double r1 = 1.0, r2 = 2.0;
  ScanResult scan1, scan2;
  std::optional<double> ratio;
  double target = 0.0;
};

/// Thresholds at radii r1 and r2 with every length scaled by r2/r1, the
/// level grid by (r2/r1)^{2-d}; independent seeds per radius.
ScalingReport scaling_check(double r1, double r2, const std::vector<double>& alpha_grid, const CrossingSetup& setup1,
                            std::size_t M, const RngSpec& rng, Exec exec = Exec::parallel);

}  // namespace brint
