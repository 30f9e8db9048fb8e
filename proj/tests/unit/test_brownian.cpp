#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "brint/brownian.hpp"
#include "brint/stats.hpp"

using namespace brint;

TEST_CASE("gaussian increments") {
  const double h = 0.01;
  Rng rng(RngSpec{3, 0, 0});
  RunningStats s, s4;
  for (int i = 0; i < 100000; ++i) {
    Point p(3);
    gaussian_step(p, std::sqrt(h), rng);
    s.add(p[0]);
    s4.add(p[0] * p[0] * p[0] * p[0]);
  }
  // Variance of the sample variance of a normal is 2 h^2 / n.
  CHECK(std::abs(s.variance() - h) < 3 * std::sqrt(2.0 / 100000) * h);
  CHECK(std::abs(s.mean()) < 3 * std::sqrt(h / 100000));
  // Kurtosis 3 within 3 sigma (sd of the fourth moment is sqrt(96) h^2 / sqrt(n)).
  CHECK(std::abs(s4.mean() - 3 * h * h) < 3 * std::sqrt(96.0 / 100000) * h * h);
}

TEST_CASE("sample_path stop rules") {
  const RngSpec spec{1, 0, 0};
  Trajectory t = sample_path(Point{1, 2, 3}, 0.01, StopRule::fixed_time(0.255), spec);
  CHECK(t.size() == std::size_t(std::ceil(0.255 / 0.01)) + 1);
  CHECK(t.front() == Point{1, 2, 3});
  CHECK(t.termination == Termination::stopped);

  Trajectory e = sample_path(Point{0, 0, 0}, 0.001, StopRule::exit_ball(Point{0, 0, 0}, 1.0), spec);
  CHECK(e.back().norm() >= 1.0);
  for (std::size_t i = 0; i + 1 < e.size(); ++i) REQUIRE(e.point(i).norm() < 1.0);

  Trajectory m = sample_path(Point{0, 0, 0}, 0.001, StopRule::escape(Point{0, 0, 0}, 100.0, 50), spec);
  CHECK(m.termination == Termination::max_steps);
  CHECK(m.size() == 51);

  // Same spec, same path.
  Trajectory e2 = sample_path(Point{0, 0, 0}, 0.001, StopRule::exit_ball(Point{0, 0, 0}, 1.0), spec);
  CHECK(e2.xs == e.xs);
  CHECK_THROWS_AS(sample_path(Point{0, 0, 0}, 0.0, StopRule::fixed_time(1), spec), DomainError);
}

TEST_CASE("exit time of the unit ball") {
  // Optional stopping: E|X_tau|^2 = d E[tau], so E[tau] = R^2 / d.
  const auto ts = exit_time_samples(3, 1.0, 20000, 1e-4, RngSpec{5, 0, 0});
  RunningStats s;
  for (double t : ts) s.add(t);
  CHECK(s.mean() == doctest::Approx(1.0 / 3).epsilon(0.02));

  const auto ex = exit_time_samples(3, 1.0, 100000, 0.0, RngSpec{5, 0, 0});
  RunningStats se;
  for (double t : ex) se.add(t);
  CHECK(std::abs(se.mean() - 1.0 / 3) < 3 * se.std_error());

  const ExitTimeLaw& law = ExitTimeLaw::get(5);
  CHECK(law.survival(0.0) == doctest::Approx(1.0));
  CHECK(law.inverse_cdf(0.5) > 0);
  CHECK(law.survival(law.inverse_cdf(0.3)) == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("exit time quantiles") {
  const double a = exit_time_quantile(3, 0.5, 100000, RngSpec{1, 0, 0});
  const double b = exit_time_quantile(3, 0.5, 100000, RngSpec{2, 0, 0});
  CHECK(a > 0);
  CHECK(std::abs(a - b) / a < 0.02);
  CHECK(exit_time_quantile(3, 0.1, 10000, RngSpec{1, 0, 0}) <= exit_time_quantile(3, 0.2, 10000, RngSpec{1, 0, 0}));
  CHECK_THROWS_AS(exit_time_quantile(3, 0.5, 99, RngSpec{}), DomainError);
  CHECK_THROWS_AS(exit_time_quantile(3, 1.0, 1000, RngSpec{}), DomainError);

  // Brownian scaling: T_{B(R/2)} = R^2 T_{B(1/2)} in law.
  auto small = exit_time_samples(3, 0.5, 10000, 0.0, RngSpec{1, 0, 1});
  auto big = exit_time_samples(3, 2.0, 10000, 0.0, RngSpec{1, 0, 2});
  for (double& t : small) t *= 16.0;
  CHECK(ks_statistic(small, big) < 0.02);
}

TEST_CASE("renewal counts") {
  CHECK(renewal_count(3, 0.0, 0.0, RngSpec{1, 0, 0}).count == 0);
  const auto rec = renewal_count(3, 50.0, 0.0, RngSpec{1, 0, 0});
  for (std::size_t i = 1; i < rec.tau_times.size(); ++i) REQUIRE(rec.tau_times[i] > rec.tau_times[i - 1]);
  // count = min{n : tau^n >= t}
  REQUIRE(rec.count >= 1);
  CHECK(rec.tau_times[rec.count - 1] >= 50.0);
  if (rec.count >= 2) CHECK(rec.tau_times[rec.count - 2] < 50.0);

  RunningStats s;
  std::vector<double> g1, g2;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto r = renewal_count(3, 50.0, 0.0, RngSpec{9, i, 0});
    s.add(double(r.count));
    g1.push_back(r.tau_times[0]);
    g2.push_back(r.tau_times[1] - r.tau_times[0]);
  }
  CHECK(s.mean() / 50.0 == doctest::Approx(3.0).epsilon(0.05));
  CHECK(ks_statistic(g1, g2) < 0.02);
}
