#include "brint/cactus.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace brint {

std::size_t CactusSet::n_segments() const {
  std::size_t n = 0;
  for (const auto& p : paths) n += p.path.size() > 1 ? p.path.size() - 1 : 1;
  return n;
}

std::vector<Primitive> CactusSet::sausages() const {
  std::vector<Primitive> out;
  for (const auto& cp : paths) {
    const auto& t = cp.path;
    if (t.size() == 1) {
      out.push_back(Primitive::ball(t.point(0), 1.0));
      continue;
    }
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      if (t.segment_joined(i)) out.push_back(Primitive::capsule(t.point(i), t.point(i + 1), 1.0));
      else out.push_back(Primitive::ball(t.point(i + 1), 1.0));
    }
  }
  return out;
}

std::shared_ptr<PrimitiveUnion> CactusSet::shape() const {
  if (paths.empty()) return nullptr;
  return std::make_shared<PrimitiveUnion>(sausages());
}

namespace {

CactusPath truncated_path(std::uint64_t id, const Point& start, double R, double T, double h, Rng& rng) {
  CactusPath cp;
  cp.id = id;
  cp.path = Trajectory(start.dim(), h);
  cp.path.push(start);
  const double half = 0.5 * R;
  const double sh = std::sqrt(h);
  Point x = start;
  double t = 0.0;
  while (t < T) {
    const double dt = std::min(h, T - t);
    Point y = x;
    gaussian_step(y, dt == h ? sh : std::sqrt(dt), rng);
    if (dist(y, start) > half) {
      // Cut the final segment where it crosses the sphere.
      const Point u = y - x, w = x - start;
      const double a = dot(u, u), b = dot(u, w), c = dot(w, w) - half * half;
      const double s = (-b + std::sqrt(std::max(0.0, b * b - a * c))) / a;
      const double frac = std::clamp(s, 0.0, 1.0);
      y = x + frac * u;
      cp.path.push(y);
      cp.duration = t + frac * dt;
      cp.exited = true;
      return cp;
    }
    x = y;
    t += dt;
    cp.path.push(x);
  }
  cp.duration = T;
  return cp;
}

}  // namespace

CactusSet phi(const std::vector<Point>& starts, double R, double c0, const SimParams& sim, const RngSpec& spec) {
  if (!(R > 1.0)) throw DomainError("phi requires R > 1");
  if (!(c0 > 0.0)) throw DomainError("phi requires c0 > 0");
  if (!(sim.step_h > 0.0)) throw DomainError("step_h must be positive");
  CactusSet out;
  out.d = starts.empty() ? 5 : starts.front().dim();
  out.scale_R = R;
  out.c0 = c0;
  out.paths.resize(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    Rng rng(spec.child(i));
    out.paths[i] = truncated_path(i, starts[i], R, c0 * R * R, sim.step_h, rng);
  }
  return out;
}

std::vector<std::pair<std::uint64_t, Point>> first_hits(const WindowSample& s, const Shape& A) {
  std::vector<std::pair<std::uint64_t, Point>> out;
  for (const auto& t : s.trajectories) {
    for (std::size_t i = 0; i < t.path.size(); ++i) {
      const Point p = t.path.point(i);
      if (A.distance(p) == 0.0) {
        out.emplace_back(t.id, p);
        break;
      }
    }
  }
  return out;
}

CactusSet psi(const WindowSample& s, const Shape& A, double R, double c0, const SimParams& sim, const RngSpec& rng) {
  const auto hits = first_hits(s, A);
  std::vector<Point> starts;
  for (const auto& h : hits) starts.push_back(h.second);
  CactusSet out = phi(starts, R, c0, sim, rng);
  out.d = A.dim();
  for (std::size_t i = 0; i < hits.size(); ++i) out.paths[i].id = hits[i].first;
  return out;
}

std::vector<CactusGeneration> iterate_cactus(const Point& x, double r_in, double R, int s, double alpha,
                                             double c0, const SimParams& sim, const RngSpec& rng) {
  const int d = x.dim();
  require_dim(d);
  if (!(1.0 < r_in && r_in < R)) throw DomainError("iterate_cactus requires 1 < r_in < R");
  if (s < 1) throw DomainError("cactus generation must be at least 1");
  if (s > s_d(d)) throw DomainError("generation exceeds s_d; outside the iterated regime");
  std::vector<CactusGeneration> gens;

  // Generation 1: run from x until the open ball B(0, r_in) is left.
  Rng walk(rng.child(0xA1));
  Point y = x;
  const double sh = std::sqrt(sim.step_h);
  while (y.norm() < r_in) gaussian_step(y, sh, walk);
  CactusGeneration g1;
  g1.seed = rng.child(1);
  g1.set = phi({y}, R, c0, sim, g1.seed);
  g1.hits = 1;
  gens.push_back(std::move(g1));

  for (int k = 2; k <= s; ++k) {
    const CactusSet& prev = gens.back().set;
    CactusGeneration gk;
    gk.seed = rng.child(static_cast<std::uint64_t>(k));
    if (prev.empty()) {
      gk.set.d = d;
      gk.set.generation = k;
      gk.set.scale_R = R;
      gk.set.c0 = c0;
      gens.push_back(std::move(gk));
      continue;
    }
    const auto A = prev.shape();
    double reach = 0.0;
    for (const auto& q : A->primitives()) reach = std::max({reach, q.a.norm() + 1.0, q.b.norm() + 1.0});
    // Local picture of B(0, reach) contains every trajectory that can hit A.
    WindowConfig cfg;
    cfg.window = BoxRegion(Point(d), std::max(reach - 1.0, 1e-3), NormTag::euclidean);
    cfg.r = 1.0;
    cfg.alpha_max = alpha;
    cfg.sim = sim;
    cfg.sim.rho_big = 0.0;
    cfg.sim.rho_kill = 0.0;
    cfg.sim.rho_esc = 0.0;
    cfg.sim.eps_hit = 0.0;
    cfg.mode = PathMode::window;
    WindowSampler sampler(cfg, RngSpec{});
    const WindowSample omega = sampler.sample(gk.seed.child(0));
    gk.window_trajectories = omega.size();
    const WindowSample kept = restrict_annulus(omega, r_in);
    gk.kept_after_annulus = kept.size();
    gk.set = psi(kept, *A, R, c0, sim, gk.seed.child(1));
    gk.set.generation = k;
    gk.hits = gk.set.paths.size();
    gens.push_back(std::move(gk));
  }
  return gens;
}

CactusExperimentResult cactus_capacity_experiment(const CactusExperimentConfig& cfg, const RngSpec& rng, Exec exec) {
  require_dim(cfg.d);
  CactusExperimentResult res;
  res.c0 = cfg.c0 > 0.0 ? cfg.c0 : exit_time_quantile(cfg.d, 0.01, cfg.c0_samples, rng.child(0xC0));
  struct Job {
    int s, N;
    double R;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (int s : cfg.s_values) {
    for (int N : cfg.N_values) {
      for (double R : cfg.R_values) {
        for (std::size_t m = 0; m < cfg.replicas; ++m) jobs.push_back({s, N, R, m});
      }
    }
  }
  const int d = cfg.d;
  res.rows = map_indices<CactusRow>(
      jobs.size(),
      [&](std::size_t j) {
        const Job& job = jobs[j];
        const RngSpec base = rng.replica(job.rep).child(mix64(std::uint64_t(job.s) * 1000003u + std::uint64_t(job.N),
                                                              std::uint64_t(job.R * 1024.0)));
        CactusSet set;
        if (job.s == 1) {
          Rng pick(base.child(1));
          std::vector<Point> starts;
          for (int i = 0; i < job.N; ++i) starts.push_back(job.R * pick.in_unit_ball(d));
          set = phi(starts, job.R, res.c0, cfg.sim, base.child(2));
        } else {
          Rng pick(base.child(1));
          const Point x = (0.5 * job.R) * pick.in_unit_ball(d);
          auto gens = iterate_cactus(x, cfg.r_in, job.R, job.s, cfg.alpha, res.c0, cfg.sim, base.child(2));
          set = gens.back().set;
        }
        CactusRow row{d, job.s, job.N, job.R, job.rep, 0.0, 0.0, std::nullopt, std::nullopt, set.paths.size(),
                      set.n_segments(), 0.0};
        for (const auto& p : set.paths) row.mean_duration += p.duration;
        if (!set.paths.empty()) row.mean_duration /= double(set.paths.size());
        if (set.empty()) return row;
        const auto shape = set.shape();
        const CapacityEstimate e = estimate_capacity_mc(*shape, cfg.sim, base.child(3), Exec::serial);
        row.cap_mc = e.value;
        row.cap_se = e.std_error;
        if (cfg.bounds_max_voxels > 0) {
          const double a = cfg.voxel_spacing > 0.0 ? cfg.voxel_spacing : std::min(0.25, job.R / 64.0);
          const VoxelSet v = voxelize_union(*shape, a);
          if (v.size() <= cfg.bounds_max_voxels) {
            const auto [lo, up] = variational_capacity_bounds(v, Exec::serial);
            row.grid_lower = lo.value;
            row.grid_upper = up.value;
          }
        }
        return row;
      },
      exec);

  std::map<std::tuple<int, int, double>, RunningStats> groups;
  for (const auto& r : res.rows) groups[{r.s, r.N, r.R}].add(r.cap_mc);
  for (const auto& [key, st] : groups) {
    const auto [s, N, R] = key;
    const double ball = cap_ball_closed_form(d, (s + 1) * R).value;
    const double m = st.mean();
    res.summaries.push_back({d, s, N, R, m, st.std_error(), m > 0 ? st.variance() / (m * m) : 0.0, m / ball});
  }
  for (int s : cfg.s_values) {
    if (cfg.R_values.size() >= 2) {
      for (int N : cfg.N_values) {
        std::vector<double> xs, ys;
        for (double R : cfg.R_values) {
          const double m = groups[{s, N, R}].mean();
          if (m > 0) {
            xs.push_back(R);
            ys.push_back(m);
          }
        }
        if (xs.size() >= 2) {
          const auto f = loglog_fit(xs, ys);
          res.fits.push_back({"R", s, double(N), f.slope, f.r2});
        }
      }
    }
    if (cfg.N_values.size() >= 2) {
      for (double R : cfg.R_values) {
        std::vector<double> xs, ys;
        for (int N : cfg.N_values) {
          const double m = groups[{s, N, R}].mean();
          if (m > 0) {
            xs.push_back(N);
            ys.push_back(m);
          }
        }
        if (xs.size() >= 2) {
          const auto f = loglog_fit(xs, ys);
          res.fits.push_back({"N", s, R, f.slope, f.r2});
        }
      }
    }
  }
  return res;
}

}  // namespace brint
