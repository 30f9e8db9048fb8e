#include <doctest.h>

#include <cmath>

#include "brint/cactus.hpp"
#include "brint/stats.hpp"

using namespace brint;

namespace {
SimParams sim_h(double h) {
  SimParams s;
  s.step_h = h;
  s.n_walkers = 4000;
  return s;
}
}  // namespace

TEST_CASE("phi truncation") {
  const int d = 5;
  const double c0 = exit_time_quantile(d, 0.01, 100000, RngSpec{1, 0, 0});
  CHECK(c0 > 0);
  CHECK(phi({}, 4.0, c0, sim_h(0.01), RngSpec{}).empty());
  CHECK_THROWS_AS(phi({Point(d)}, 1.0, c0, sim_h(0.01), RngSpec{}), DomainError);

  const double R = 8.0, h = 0.01;
  std::vector<Point> starts(400, Point(d));
  const auto set = phi(starts, R, c0, sim_h(h), RngSpec{2, 0, 0});
  RunningStats dur;
  for (const auto& p : set.paths) {
    dur.add(p.duration);
    REQUIRE(p.duration <= c0 * R * R + 1e-12);
    const Point s = p.path.front();
    for (std::size_t i = 0; i < p.path.size(); ++i)
      REQUIRE(dist(p.path.point(i), s) <= R / 2 + 3 * std::sqrt(h * d));
  }
  CHECK(dur.mean() / (c0 * R * R) >= 0.9);
  CHECK(dur.mean() / (c0 * R * R) <= 1.0);
}

TEST_CASE("psi uses first hits") {
  const int d = 5;
  const BoxRegion K(Point(d), 2.0, NormTag::euclidean);
  SimParams sim = sim_h(0.02);
  const auto s = sample_window(K, 1.0, 0.05, sim, RngSpec{3, 0, 0});
  REQUIRE(s.size() > 0);
  Point far(d);
  far[0] = 100.0;
  CHECK(psi(s, BallShape(far, 1.0), 4.0, 0.05, sim, RngSpec{4, 0, 0}).empty());
  const auto all = psi(s, BallShape(Point(d), 50.0), 4.0, 0.05, sim, RngSpec{4, 0, 0});
  CHECK(all.paths.size() == s.size());
  for (std::size_t i = 0; i < all.paths.size(); ++i) CHECK(all.paths[i].path.front() == s.trajectories[i].path.front());
}

TEST_CASE("iterated cactus") {
  const int d = 5;
  const double R = 6.0, c0 = 0.02;
  SimParams sim = sim_h(0.02);
  sim.n_walkers = 20000;
  Point x(d);
  CHECK_THROWS_AS(iterate_cactus(x, 2.0, R, 3, 0.01, c0, sim, RngSpec{}), DomainError);
  CHECK_THROWS_AS(iterate_cactus(x, 0.5, R, 1, 0.01, c0, sim, RngSpec{}), DomainError);

  const auto one = iterate_cactus(x, 2.0, R, 1, 0.01, c0, sim, RngSpec{5, 0, 0});
  REQUIRE(one.size() == 1);
  CHECK(one[0].set.paths.size() == 1);
  CHECK(one[0].set.paths[0].path.front().norm() >= 2.0);

  const auto two = iterate_cactus(x, 2.0, R, 2, 0.05, c0, sim, RngSpec{5, 0, 0});
  REQUIRE(two.size() == 2);
  // Generation 1 does not depend on later generations.
  CHECK(two[0].set.paths[0].path.xs == one[0].set.paths[0].path.xs);
  CHECK_FALSE(two[1].seed == two[0].seed);
  const double slack = 3 * std::sqrt(sim.step_h * d) + 1.0;
  for (std::size_t k = 0; k < two.size(); ++k)
    for (const auto& p : two[k].set.paths)
      for (std::size_t i = 0; i < p.path.size(); ++i) REQUIRE(p.path.point(i).norm() <= (k + 2) * R + slack);
}

TEST_CASE("small cactus experiment") {
  CactusExperimentConfig cfg;
  cfg.d = 5;
  cfg.N_values = {1, 2};
  cfg.R_values = {4, 8};
  cfg.replicas = 6;
  cfg.c0_samples = 10000;
  cfg.sim = sim_h(0.01);
  cfg.sim.n_walkers = 2000;
  const auto a = cactus_capacity_experiment(cfg, RngSpec{6, 0, 0});
  const auto b = cactus_capacity_experiment(cfg, RngSpec{6, 0, 0}, Exec::serial);
  CHECK(a.rows.size() == 24);
  CHECK(a.summaries.size() == 4);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].cap_mc == b.rows[i].cap_mc);
  for (const auto& s : a.summaries) {
    CHECK(s.mean_cap > 0);
    CHECK(s.ball_ratio < 1.0);
  }
  CHECK_FALSE(a.fits.empty());
}
