#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "brint/interlacement.hpp"
#include "brint/stats.hpp"

using namespace brint;

namespace {

SimParams quick_sim(double h = 0.01) {
  SimParams s;
  s.step_h = h;
  s.n_walkers = 50000;
  return s;
}

std::set<std::uint64_t> ids(const WindowSample& s) {
  std::set<std::uint64_t> out;
  for (const auto& t : s.trajectories) out.insert(t.id);
  return out;
}

}  // namespace

TEST_CASE("empty and basic samples") {
  const BoxRegion K(Point{0, 0, 0}, 1.0);
  auto s0 = sample_window(K, 1.0, 0.0, quick_sim(), RngSpec{1, 0, 0});
  CHECK(s0.size() == 0);

  auto s = sample_window(K, 1.0, 2.0, quick_sim(), RngSpec{1, 0, 0});
  REQUIRE(s.size() > 0);
  const double eps = s.sim.eps_hit;
  for (const auto& t : s.trajectories) {
    CHECK(t.label >= 0.0);
    CHECK(t.label <= 2.0);
    // Starts lie within eps_hit of the boundary of B(K, r).
    CHECK(std::abs(K.distance(t.path.front()) - 1.0) <= eps + 1e-12);
  }
  auto again = sample_window(K, 1.0, 2.0, quick_sim(), RngSpec{1, 0, 0});
  REQUIRE(again.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(again.trajectories[i].path.xs == s.trajectories[i].path.xs);
}

TEST_CASE("vacancy of a point-like window") {
  const double pi = std::numbers::pi;
  const BoxRegion K(Point{0, 0, 0}, 0.01, NormTag::euclidean);
  const WindowSampler ws({K, 1.0, 0.1, quick_sim(), PathMode::window, false}, RngSpec{1, 0, 0});
  CHECK(ws.enlarged_cap().value == doctest::Approx(2 * pi * 1.01));
  const std::size_t M = 10000;
  std::size_t empty = 0;
  RunningStats counts;
  for (std::size_t i = 0; i < M; ++i) {
    const auto s = ws.sample(RngSpec{2, i, 0});
    empty += s.size() == 0;
    counts.add(double(s.size()));
  }
  const double p = std::exp(-0.1 * 2 * pi);
  CHECK(std::abs(double(empty) / M - p) < 3 * binomial_sigma(p, M) + 0.01 * p);
  const double mu = 0.1 * ws.enlarged_cap().value;
  CHECK(counts.mean() / mu > 0.97);
  CHECK(counts.mean() / mu < 1.03);
}

TEST_CASE("poisson counts and thinning") {
  const BoxRegion K(Point{0, 0, 0}, 0.5);
  const WindowSampler ws({K, 0.5, 1.0, quick_sim(0.05), PathMode::window, false}, RngSpec{1, 0, 0});
  RunningStats full, half;
  for (std::size_t i = 0; i < 10000; ++i) {
    const auto s = ws.sample(RngSpec{3, i, 0});
    full.add(double(s.size()));
    half.add(double(restrict_level(s, 0.5).size()));
  }
  const double mu = ws.enlarged_cap().value;
  CHECK(full.mean() / mu == doctest::Approx(1.0).epsilon(0.03));
  CHECK(full.variance() / full.mean() > 0.9);
  CHECK(full.variance() / full.mean() < 1.1);
  CHECK(half.mean() / (0.5 * mu) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(half.variance() / half.mean() > 0.9);
  CHECK(half.variance() / half.mean() < 1.1);
}

TEST_CASE("level restriction and superposition") {
  const BoxRegion K(Point{0, 0, 0}, 1.0);
  const auto s = sample_window(K, 1.0, 3.0, quick_sim(), RngSpec{4, 0, 0});
  CHECK(ids(restrict_level(s, 3.0)) == ids(s));
  CHECK(restrict_level(s, 0.0).size() == 0);
  CHECK_THROWS_AS(restrict_level(s, 3.5), DomainError);
  for (double a1 : {0.2, 0.7, 1.5})
    for (double a2 : {0.7, 1.5, 2.9}) {
      if (a1 > a2) continue;
      const auto i1 = ids(restrict_level(s, a1)), i2 = ids(restrict_level(s, a2));
      CHECK(std::includes(i2.begin(), i2.end(), i1.begin(), i1.end()));
    }

  const auto e = sample_window(K, 1.0, 0.0, quick_sim(), RngSpec{5, 0, 0});
  const auto u = superpose(s, e);
  CHECK(u.size() == s.size());
  CHECK(u.alpha_max == s.alpha_max);

  const auto t = sample_window(K, 1.0, 1.0, quick_sim(), RngSpec{6, 0, 0});
  const auto st = superpose(s, t);
  CHECK(st.size() == s.size() + t.size());
  CHECK(st.alpha_max == doctest::Approx(4.0));
  for (std::size_t i = s.size(); i < st.size(); ++i) CHECK(st.trajectories[i].label >= 3.0);

  const auto other = sample_window(BoxRegion(Point{0, 0, 0}, 2.0), 1.0, 1.0, quick_sim(), RngSpec{6, 0, 0});
  CHECK_THROWS_AS(superpose(s, other), DomainError);
}

TEST_CASE("vacancy indicator") {
  const BoxRegion K(Point{0, 0, 0}, 1.0);
  const BoxRegion K0(Point{0.5, 0, 0}, 0.25);
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto s = sample_window(K, 1.0, 1.0, quick_sim(), RngSpec{7, rep, 0});
    CHECK(vacancy_indicator(s, 0.0, K0));
    bool prev = true;
    for (double a = 0.05; a <= 1.0; a += 0.05) {
      const bool v = vacancy_indicator(s, a, K0);
      CHECK((prev || !v));
      prev = v;
    }
  }
  const auto s = sample_window(K, 1.0, 1.0, quick_sim(), RngSpec{7, 0, 0});
  CHECK_THROWS_AS(vacancy_indicator(s, 0.5, BoxRegion(Point{1, 0, 0}, 0.5)), DomainError);
}

TEST_CASE("superposition matches a single level in law") {
  const BoxRegion K(Point{0, 0, 0}, 0.5);
  const BoxRegion K0(Point{0, 0, 0}, 0.25);
  const WindowSampler full({K, 1.0, 0.2, quick_sim(0.02), PathMode::window, false}, RngSpec{1, 0, 0});
  const WindowSampler half({K, 1.0, 0.1, quick_sim(0.02), PathMode::window, false}, full.enlarged_cap());
  const std::size_t M = 4000;
  std::size_t v1 = 0, v2 = 0;
  for (std::size_t i = 0; i < M; ++i) {
    v1 += vacancy_indicator(full.sample(RngSpec{8, i, 0}), 0.2, K0);
    const auto u = superpose(half.sample(RngSpec{9, i, 0}), half.sample(RngSpec{10, i, 0}));
    v2 += vacancy_indicator(u, 0.2, K0);
  }
  const double p1 = double(v1) / M, p2 = double(v2) / M;
  const double sig = std::sqrt(p1 * (1 - p1) / M + p2 * (1 - p2) / M);
  CHECK(std::abs(p1 - p2) < 3 * sig);
}

TEST_CASE("annulus restriction") {
  const BoxRegion K(Point{0, 0, 0}, 0.5);
  SimParams sim = quick_sim();
  sim.rho_esc = 6.0;
  const auto s = sample_window(K, 1.0, 2.0, sim, RngSpec{11, 0, 0}, PathMode::escape);
  CHECK(ids(restrict_annulus(s, 0.0)) == ids(s));
  CHECK(restrict_annulus(s, 6.0).size() == 0);
  const auto kept = restrict_annulus(s, 1.2);
  std::size_t removed = 0;
  for (const auto& t : s.trajectories) removed += path_min_norm(t.path) < 1.2;
  CHECK(kept.size() + removed == s.size());
  for (const auto& t : kept.trajectories) CHECK(path_min_norm(t.path) >= 1.2);
}

TEST_CASE("scaling transport") {
  const BoxRegion K(Point{0, 0, 0}, 1.0);
  const auto s = sample_window(K, 1.0, 1.0, quick_sim(), RngSpec{12, 0, 0});
  const auto id = scaling_transport(s, 1.0);
  REQUIRE(id.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(id.trajectories[i].path.xs == s.trajectories[i].path.xs);
    CHECK(id.trajectories[i].label == s.trajectories[i].label);
  }
  const double lam = 2.0;
  const auto t = scaling_transport(s, lam);
  CHECK(t.radius_r == 2.0);
  CHECK(t.window.half_width == 2.0);
  CHECK(t.alpha_max == doctest::Approx(0.5));
  const BoxRegion K0(Point{0.25, 0.25, 0}, 0.5);
  const BoxRegion K0s(Point{0.5, 0.5, 0}, 1.0);
  for (double a : {0.1, 0.3, 0.6, 1.0}) CHECK(vacancy_indicator(s, a, K0) == vacancy_indicator(t, a / lam, K0s));
}

TEST_CASE("sample serialization round trip") {
  const BoxRegion K(Point{0, 0, 0}, 1.0);
  const auto s = sample_window(K, 1.0, 1.0, quick_sim(), RngSpec{13, 0, 0});
  std::stringstream ss;
  write_window_sample(ss, s);
  const auto r = read_window_sample(ss);
  REQUIRE(r.size() == s.size());
  CHECK(r.alpha_max == s.alpha_max);
  CHECK(r.enlarged_cap.value == s.enlarged_cap.value);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(r.trajectories[i].label == s.trajectories[i].label);
    CHECK(r.trajectories[i].path.xs == s.trajectories[i].path.xs);
    CHECK(r.trajectories[i].path.breaks == s.trajectories[i].path.breaks);
  }
  std::stringstream bad("brint-window 7\n");
  CHECK_THROWS(read_window_sample(bad));
}

TEST_CASE("geometry helpers") {
  Trajectory t(3, 0.1);
  t.push(Point{-3, 2, 0});
  t.push(Point{3, 2, 0});
  CHECK(path_region_distance(t, BoxRegion(Point{0, 0, 0}, 1.0)) == doctest::Approx(1.0));
  CHECK(path_min_norm(t) == doctest::Approx(2.0));
  CHECK(segment_box_distance2(Point{2, 2, 0}, Point{3, 3, 0}, Point{0, 0, 0}, 1.0) == doctest::Approx(2.0));
}
