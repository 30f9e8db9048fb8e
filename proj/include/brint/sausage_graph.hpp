#pragma once

// Intersection graph of the r-sausages of sampled trajectories.

#include <cstdint>
#include <limits>
#include <vector>

#include "brint/interlacement.hpp"
#include "brint/parallel.hpp"

namespace brint {

struct SausageGraph {
  std::size_t n_vertices = 0;
  double radius_r = 0.0;
  std::vector<std::vector<std::uint32_t>> adj;  // sorted neighbour lists
  std::vector<std::uint64_t> ids;               // trajectory id per vertex

  std::size_t n_edges() const;
  bool has_edge(std::uint32_t i, std::uint32_t j) const;
  /// Sorted (i < j) edge list.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;
};

SausageGraph make_graph(std::size_t n, double r, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

/// Squared distance between segments [p0, p1] and [q0, q1] in R^d.
double segment_segment_distance2(const Point& p0, const Point& p1, const Point& q0, const Point& q1);

/// Edge (i, j) iff the polylines come within 2r. Broad phase: segments hashed
/// by midpoint into a uniform grid of cell size 2r + longest segment, so that
/// close segments always share a cell or sit in neighbouring cells.
SausageGraph build_graph(const std::vector<const Trajectory*>& paths, double r, Exec exec = Exec::parallel);
/// All-pairs reference implementation.
SausageGraph build_graph_brute(const std::vector<const Trajectory*>& paths, double r);
/// Graph of the trajectories of level <= alpha.
SausageGraph build_graph(const WindowSample& s, double alpha, Exec exec = Exec::parallel);

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

std::vector<int> bfs_distances(const SausageGraph& g, std::uint32_t source);
/// One BFS row per source.
std::vector<std::vector<int>> graph_distances(const SausageGraph& g, const std::vector<std::uint32_t>& sources);

struct DiameterRow {
  double rho_esc = 0.0;
  std::size_t n_vertices = 0;    // trajectories of level <= alpha
  std::size_t n_qualifying = 0;  // of which meet `inner` within r
  std::uint64_t n_pairs = 0;
  std::vector<std::uint64_t> hop_counts;  // hop_counts[k] = pairs at distance k (k >= 1)
  std::uint64_t unreachable = 0;
  double frac_le_sd = 0.0;       // NaN without pairs
  double frac_ge2 = 0.0;         // distance >= 2, unreachable included
  double frac_unreachable = 0.0;
};

/// For each radius of the ladder, every path is cut at its first point outside
/// B(center, rho); pairs of qualifying trajectories are then classified by hop
/// distance. The sample must be an escape-mode sample whose paths reach the
/// largest ladder radius.
std::vector<DiameterRow> diameter_probe(const WindowSample& s, double alpha, const BoxRegion& inner,
                                        const std::vector<double>& ladder, Exec exec = Exec::parallel);

/// Prefix of a path up to and including its first point at distance >= rho from c.
Trajectory cut_at_radius(const Trajectory& t, const Point& c, double rho);

}  // namespace brint
