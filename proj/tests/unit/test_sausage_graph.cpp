#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "brint/sausage_graph.hpp"

using namespace brint;

namespace {

Trajectory line(const Point& a, const Point& b, int pieces = 1) {
  Trajectory t(a.dim(), 0.01);
  for (int i = 0; i <= pieces; ++i) t.push(a + (double(i) / pieces) * (b - a));
  return t;
}

std::vector<const Trajectory*> ptrs(const std::vector<Trajectory>& v) {
  std::vector<const Trajectory*> p;
  for (const auto& t : v) p.push_back(&t);
  return p;
}

}  // namespace

TEST_CASE("edge threshold at 2r") {
  const double r = 0.5;
  for (double gap : {-1e-6, 1e-6}) {
    std::vector<Trajectory> v{line(Point{0, 0, 0}, Point{10, 0, 0}, 7), line(Point{0, 2 * r + gap, 0}, Point{10, 2 * r + gap, 0}, 3)};
    const auto g = build_graph(ptrs(v), r);
    CHECK(g.n_edges() == (gap < 0 ? 1u : 0u));
    CHECK(build_graph_brute(ptrs(v), r).edges() == g.edges());
  }
  std::vector<Trajectory> one{line(Point{0, 0, 0}, Point{1, 1, 1}, 4)};
  const auto g1 = build_graph(ptrs(one), r);
  CHECK(g1.n_vertices == 1);
  CHECK(g1.n_edges() == 0);
}

TEST_CASE("segment distance") {
  CHECK(segment_segment_distance2(Point{0, 0, 0}, Point{1, 0, 0}, Point{0.5, 1, -1}, Point{0.5, 1, 1}) == doctest::Approx(1.0));
  CHECK(segment_segment_distance2(Point{0, 0, 0}, Point{1, 0, 0}, Point{3, 0, 0}, Point{4, 0, 0}) == doctest::Approx(4.0));
  CHECK(segment_segment_distance2(Point{0, 0, 0}, Point{0, 0, 0}, Point{0, 3, 0}, Point{0, 3, 0}) == doctest::Approx(9.0));
}

TEST_CASE("hashed adjacency equals brute force") {
  const BoxRegion K(Point{0, 0, 0}, 1.0);
  SimParams sim;
  sim.step_h = 0.05;
  sim.n_walkers = 20000;
  const WindowSampler ws({K, 0.3, 1.5, sim, PathMode::window, false}, RngSpec{1, 0, 0});
  int tested = 0;
  for (std::uint64_t rep = 0; tested < 50; ++rep) {
    const auto s = ws.sample(RngSpec{2, rep, 0});
    if (s.size() > 30 || s.size() < 2) continue;
    ++tested;
    std::vector<const Trajectory*> p;
    for (const auto& t : s.trajectories) p.push_back(&t.path);
    for (double r : {0.05, 0.3, 1.0}) {
      const auto fast = build_graph(p, r, Exec::serial);
      REQUIRE(fast.edges() == build_graph_brute(p, r).edges());
      REQUIRE(build_graph(p, r, Exec::parallel).edges() == fast.edges());
      for (std::uint32_t i = 0; i < fast.n_vertices; ++i) REQUIRE_FALSE(fast.has_edge(i, i));
    }
  }
}

TEST_CASE("breadth-first distances") {
  auto k3 = make_graph(3, 1.0, {{0, 1}, {0, 2}, {1, 2}});
  for (const auto& row : graph_distances(k3, {0, 1, 2}))
    for (int x : row) CHECK(x <= 1);
  auto path = make_graph(3, 1.0, {{0, 1}, {1, 2}});
  CHECK(bfs_distances(path, 0)[2] == 2);
  auto two = make_graph(4, 1.0, {{0, 1}, {2, 3}});
  CHECK(bfs_distances(two, 0)[2] == kUnreachable);
  CHECK(bfs_distances(two, 3)[2] == 1);
  CHECK_THROWS_AS(bfs_distances(two, 4), DomainError);
}

TEST_CASE("cutting paths and ladder monotonicity") {
  Trajectory t = line(Point{0, 0, 0}, Point{10, 0, 0}, 10);
  const auto c = cut_at_radius(t, Point{0, 0, 0}, 3.5);
  CHECK(c.size() == 5);
  CHECK(c.back()[0] == doctest::Approx(4.0));

  const BoxRegion K(Point{0, 0, 0}, 1.0);
  SimParams sim;
  sim.step_h = 0.02;
  sim.n_walkers = 20000;
  sim.rho_esc = 8.0;
  const auto s = sample_window(K, 0.5, 1.0, sim, RngSpec{3, 0, 0}, PathMode::escape);
  REQUIRE(s.size() >= 2);
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> edges;
  for (double rho : {2.0, 4.0, 8.0}) {
    std::vector<Trajectory> cut;
    for (const auto& tr : s.trajectories) cut.push_back(cut_at_radius(tr.path, K.center, rho));
    edges.push_back(build_graph(ptrs(cut), 0.5).edges());
  }
  for (std::size_t k = 1; k < edges.size(); ++k)
    CHECK(std::includes(edges[k].begin(), edges[k].end(), edges[k - 1].begin(), edges[k - 1].end()));

  const auto rows = diameter_probe(s, 1.0, K, {2.0, 4.0, 8.0});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    std::uint64_t tot = r.unreachable;
    for (std::size_t h = 1; h < r.hop_counts.size(); ++h) tot += r.hop_counts[h];
    CHECK(tot == r.n_pairs);
    CHECK(r.n_pairs == r.n_qualifying * (r.n_qualifying - 1) / 2);
  }
  // Distances only shrink as the paths grow.
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].unreachable <= rows[k - 1].unreachable);
}
