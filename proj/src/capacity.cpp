#include "brint/capacity.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <unordered_set>

#include "brint/stats.hpp"

namespace brint {

SimParams SimParams::resolved(double circumradius) const {
  SimParams s = *this;
  const double scale = std::max(circumradius, 1e-12);
  if (s.rho_big <= 0.0) s.rho_big = 1.25 * scale;
  if (s.rho_kill <= 0.0) s.rho_kill = 4.0 * s.rho_big;
  if (s.eps_hit <= 0.0) s.eps_hit = 1e-3 * scale;
  if (s.rho_esc <= 0.0) s.rho_esc = s.rho_big;
  if (!(s.rho_big > circumradius)) throw ConfigurationError("launch radius must exceed the set's circumradius");
  if (!(s.rho_kill > s.rho_big)) throw ConfigurationError("kill radius must exceed the launch radius");
  if (!(s.rho_esc >= s.rho_big)) throw ConfigurationError("escape radius must be at least the launch radius");
  return s;
}

std::string to_string(CapMethod m) {
  switch (m) {
    case CapMethod::mc_hitting: return "mc_hitting";
    case CapMethod::closed_form: return "closed_form";
    case CapMethod::grid_lower: return "grid_lower";
    case CapMethod::grid_upper: return "grid_upper";
  }
  return "unknown";
}

double inv_pow_dm2(double r2, int d) {
  switch (d) {
    case 3: return 1.0 / std::sqrt(r2);
    case 4: return 1.0 / r2;
    case 5: return 1.0 / (r2 * std::sqrt(r2));
    case 6: return 1.0 / (r2 * r2);
    case 7: return 1.0 / (r2 * r2 * std::sqrt(r2));
    case 8: return 1.0 / (r2 * r2 * r2);
    default: return std::pow(r2, 1.0 - 0.5 * d);
  }
}

double green(const Point& x, const Point& y) {
  const double r2 = dist2(x, y);
  if (r2 == 0.0) throw DomainError("green function is singular at x = y");
  return green_constant(x.dim()) * inv_pow_dm2(r2, x.dim());
}

CapacityEstimate cap_ball_closed_form(int d, double R) {
  require_dim(d);
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");
  CapacityEstimate e;
  e.value = std::pow(R, d - 2) / green_constant(d);
  e.method = CapMethod::closed_form;
  return e;
}

double hitting_prob_ball(const Point& z, double R) {
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");
  const double n = z.norm();
  if (n <= R) throw DomainError("start lies inside the ball");
  return std::pow(R / n, z.dim() - 2);
}

Point sample_return_point(const Point& x, const Point& c, double rho, Rng& rng) {
  const int d = x.dim();
  const double r = dist(x, c);
  const double gap = r - rho;
  for (;;) {
    Point y = c + rho * rng.unit_vector(d);
    const double a = gap / dist(x, y);
    if (rng.uniform() < std::pow(a, d)) return y;
  }
}

bool wos_walk(const Shape& K, Point x, const WosConfig& cfg, Rng& rng, Point* hit) {
  const int d = x.dim();
  const double kill2 = cfg.rho_kill * cfg.rho_kill;
  for (std::size_t step = 0; cfg.max_steps == 0 || step < cfg.max_steps; ++step) {
    const double r2 = dist2(x, cfg.center);
    if (r2 > kill2) {
      const double r = std::sqrt(r2);
      if (rng.uniform() >= std::pow(cfg.rho_big / r, d - 2)) return false;
      x = sample_return_point(x, cfg.center, cfg.rho_big, rng);
      continue;
    }
    const double delta = K.distance(x);
    if (delta < cfg.eps) {
      if (hit) *hit = x;
      return true;
    }
    x += delta * rng.unit_vector(d);
  }
  throw ConfigurationError("walk-on-spheres step budget exhausted");
}

WosConfig wos_config(const Shape& K, const SimParams& sim) {
  const SimParams s = sim.resolved(K.circumradius());
  return {K.center(), s.rho_big, s.rho_kill, s.eps_hit, s.max_steps};
}

namespace {

struct HitCounter {
  std::uint64_t launched = 0;
  std::uint64_t hits = 0;
};

constexpr std::size_t kWalkerChunk = 2048;

// The set sits strictly inside the launch sphere, so one more relative
// correction for the eps-neighbourhood is all the bias there is.
double eps_bias(const Shape& K, double eps) {
  const double scale = std::max(K.circumradius() * 1e-2, eps);
  return std::pow(1.0 + eps / scale, K.dim() - 2) - 1.0;
}

}  // namespace

Point sample_equilibrium_with(const Shape& K, const WosConfig& cfg, Rng& rng) {
  const int d = K.dim();
  constexpr std::uint64_t kMaxLaunches = 100'000;  // no hit in 1e5 launches: acceptance below ~1e-4
  for (std::uint64_t launched = 1; launched <= kMaxLaunches; ++launched) {
    Point start = cfg.center + cfg.rho_big * rng.unit_vector(d);
    Point hit;
    if (wos_walk(K, start, cfg, rng, &hit)) return hit;
  }
  throw ConfigurationError("equilibrium sampling acceptance below 1e-4");
}

Point sample_equilibrium(const Shape& K, const SimParams& sim, const RngSpec& spec) {
  Rng rng(spec);
  return sample_equilibrium_with(K, wos_config(K, sim), rng);
}

std::vector<Point> sample_equilibrium_many(const Shape& K, const SimParams& sim, std::size_t n,
                                           const RngSpec& rng, Exec exec) {
  return map_indices<Point>(n, [&](std::size_t i) { return sample_equilibrium(K, sim, rng.child(i)); }, exec);
}

CapacityEstimate estimate_capacity_mc(const Shape& K, const SimParams& sim, const RngSpec& spec, Exec exec) {
  const SimParams s = sim.resolved(K.circumradius());
  const WosConfig cfg{K.center(), s.rho_big, s.rho_kill, s.eps_hit, s.max_steps};
  const int d = K.dim();
  const std::size_t n = s.n_walkers;
  if (n == 0) throw DomainError("capacity estimate needs walkers");
  const std::size_t chunks = (n + kWalkerChunk - 1) / kWalkerChunk;
  const auto parts = map_indices<HitCounter>(
      chunks,
      [&](std::size_t c) {
        Rng rng(spec.child(c));
        HitCounter h;
        const std::size_t hi = std::min(n, (c + 1) * kWalkerChunk);
        for (std::size_t i = c * kWalkerChunk; i < hi; ++i) {
          Point start = cfg.center + cfg.rho_big * rng.unit_vector(d);
          ++h.launched;
          if (wos_walk(K, start, cfg, rng)) ++h.hits;
        }
        return h;
      },
      exec);
  HitCounter tot;
  for (const auto& p : parts) {
    tot.launched += p.launched;
    tot.hits += p.hits;
  }
  const double p = double(tot.hits) / double(tot.launched);
  if (tot.hits == 0 || p < 1e-4) throw ConfigurationError("hitting frequency below 1e-4; launch sphere too large");
  const double scale = std::pow(s.rho_big, d - 2) / green_constant(d);
  CapacityEstimate e;
  e.value = p * scale;
  e.std_error = binomial_sigma(p, tot.launched) * scale;
  e.n_walkers = tot.launched;
  e.method = CapMethod::mc_hitting;
  e.bias_bound = eps_bias(K, s.eps_hit);
  e.rho_big = s.rho_big;
  return e;
}

std::pair<double, double> hitting_frequency_mc(const Shape& K, const Point& z, const SimParams& sim,
                                               std::size_t n, const RngSpec& spec) {
  WosConfig cfg = wos_config(K, sim);
  const std::size_t chunks = (n + kWalkerChunk - 1) / kWalkerChunk;
  const auto parts = map_indices<std::uint64_t>(chunks, [&](std::size_t c) {
    Rng rng(spec.child(c));
    std::uint64_t hits = 0;
    const std::size_t hi = std::min(n, (c + 1) * kWalkerChunk);
    for (std::size_t i = c * kWalkerChunk; i < hi; ++i) hits += wos_walk(K, z, cfg, rng) ? 1 : 0;
    return hits;
  });
  std::uint64_t hits = 0;
  for (auto h : parts) hits += h;
  const double p = double(hits) / double(n);
  return {p, binomial_sigma(p, n)};
}

Point VoxelSet::cell_center(std::size_t i) const {
  Point p = origin;
  for (int k = 0; k < d; ++k) p[k] += spacing * cells[i * std::size_t(d) + std::size_t(k)];
  return p;
}

std::vector<Primitive> VoxelSet::cubes() const {
  std::vector<Primitive> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(Primitive::cube(cell_center(i), 0.5 * spacing));
  return out;
}

namespace {

struct CellKey {
  std::array<int, kMaxDim> c{};
  bool operator==(const CellKey& o) const { return c == o.c; }
};
struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (int v : k.c) h = mix64(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
    return static_cast<std::size_t>(h);
  }
};

void for_each_cell_in_box(int d, const std::array<int, kMaxDim>& lo, const std::array<int, kMaxDim>& hi,
                          const auto& f) {
  std::array<int, kMaxDim> idx = lo;
  for (;;) {
    f(idx);
    int k = 0;
    while (k < d) {
      if (++idx[k] <= hi[k]) break;
      idx[k] = lo[k];
      ++k;
    }
    if (k == d) return;
  }
}

}  // namespace

VoxelSet voxelize(const Shape& K, double spacing) {
  if (!(spacing > 0.0)) throw DomainError("voxel spacing must be positive");
  VoxelSet v;
  v.d = K.dim();
  v.spacing = spacing;
  v.origin = K.center();
  const int m = static_cast<int>(std::ceil(K.circumradius() / spacing)) + 1;
  std::array<int, kMaxDim> lo{}, hi{};
  for (int k = 0; k < v.d; ++k) {
    lo[k] = -m;
    hi[k] = m;
  }
  for_each_cell_in_box(v.d, lo, hi, [&](const std::array<int, kMaxDim>& idx) {
    Point p = v.origin;
    for (int k = 0; k < v.d; ++k) p[k] += spacing * idx[k];
    if (K.distance(p) == 0.0) v.cells.insert(v.cells.end(), idx.begin(), idx.begin() + v.d);
  });
  if (v.cells.empty()) throw DomainError("voxelization produced an empty set");
  return v;
}

VoxelSet voxelize_union(const PrimitiveUnion& K, double spacing) {
  if (!(spacing > 0.0)) throw DomainError("voxel spacing must be positive");
  VoxelSet v;
  v.d = K.dim();
  v.spacing = spacing;
  v.origin = Point(v.d);
  std::unordered_set<CellKey, CellHash> seen;
  std::vector<CellKey> order;
  for (const auto& q : K.primitives()) {
    std::array<int, kMaxDim> lo{}, hi{};
    for (int k = 0; k < v.d; ++k) {
      lo[k] = static_cast<int>(std::floor((std::min(q.a[k], q.b[k]) - q.radius) / spacing));
      hi[k] = static_cast<int>(std::ceil((std::max(q.a[k], q.b[k]) + q.radius) / spacing));
    }
    for_each_cell_in_box(v.d, lo, hi, [&](const std::array<int, kMaxDim>& idx) {
      Point p(v.d);
      for (int k = 0; k < v.d; ++k) p[k] = spacing * idx[k];
      if (q.distance(p) > 0.0) return;
      CellKey key;
      std::copy(idx.begin(), idx.begin() + v.d, key.c.begin());
      if (seen.insert(key).second) order.push_back(key);
    });
  }
  if (order.empty()) throw DomainError("voxelization produced an empty set");
  std::sort(order.begin(), order.end(), [](const CellKey& a, const CellKey& b) { return a.c < b.c; });
  for (const auto& key : order) v.cells.insert(v.cells.end(), key.c.begin(), key.c.begin() + v.d);
  return v;
}

std::vector<double> voxel_potentials(const VoxelSet& K, Exec exec) {
  const std::size_t n = K.size();
  if (n == 0) throw DomainError("variational bounds of an empty set");
  const int d = K.d;
  const double cell_vol = std::pow(K.spacing, d);
  const double rho_eq = std::pow(cell_vol / unit_ball_volume(d), 1.0 / d);
  const double self = rho_eq * rho_eq / (d - 2);
  const double pref = cell_vol * green_constant(d);
  std::vector<double> centers(n * std::size_t(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) centers[i * std::size_t(d) + std::size_t(k)] = K.spacing * K.cells[i * std::size_t(d) + std::size_t(k)];
  }
  std::vector<double> pot(n);
  for_each_index(
      n,
      [&](std::size_t i) {
        const double* ci = &centers[i * std::size_t(d)];
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const double* cj = &centers[j * std::size_t(d)];
          double r2 = 0.0;
          for (int k = 0; k < d; ++k) {
            const double t = ci[k] - cj[k];
            r2 += t * t;
          }
          s += inv_pow_dm2(r2, d);
        }
        pot[i] = pref * s + self;
      },
      exec);
  return pot;
}

std::pair<CapacityEstimate, CapacityEstimate> variational_capacity_bounds(const VoxelSet& K, Exec exec) {
  const auto pot = voxel_potentials(K, exec);
  const auto [mn, mx] = std::minmax_element(pot.begin(), pot.end());
  CapacityEstimate lo, up;
  lo.value = K.volume() / *mx;
  lo.method = CapMethod::grid_lower;
  up.value = K.volume() / *mn;
  up.method = CapMethod::grid_upper;
  return {lo, up};
}

namespace {

// Potential of the uniform unit-density unit ball at distance rho from its center.
double unit_ball_potential(int d, double rho) {
  if (rho <= 1.0) return 1.0 / (d - 2) - rho * rho / d;
  return unit_ball_volume(d) * green_constant(d) * std::pow(rho, 2 - d);
}

// Fraction of the sphere S(a, rho) lying inside B(b, 1), |a - b| = D.
double sphere_fraction_inside(int d, double rho, double D) {
  if (rho + D <= 1.0) return 1.0;
  if (rho >= 1.0 + D || rho <= D - 1.0) return 0.0;
  const double t = std::clamp((rho * rho + D * D - 1.0) / (2.0 * rho * D), -1.0, 1.0);
  const double half = 0.5 * boost::math::ibeta(0.5 * (d - 1), 0.5, 1.0 - t * t);
  return t >= 0.0 ? half : 1.0 - half;
}

double ball_pair_energy_quadrature(int d, double D) {
  const double area = unit_sphere_area(d);
  auto integrand = [&](double rho) {
    return unit_ball_potential(d, rho) * area * std::pow(rho, d - 1) * sphere_fraction_inside(d, rho, D);
  };
  std::vector<double> cuts = {std::max(0.0, D - 1.0), std::abs(1.0 - D), 1.0, 1.0 + D};
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-15) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, cuts[i], cuts[i + 1], 12, 1e-12);
  }
  return total;
}

struct PairEnergyTable {
  static constexpr int kN = 2048;
  std::vector<double> values;
  explicit PairEnergyTable(int d) : values(kN + 1) {
    for (int i = 0; i <= kN; ++i) values[i] = ball_pair_energy_quadrature(d, 2.0 * i / kN);
  }
  double at(double D) const {
    const double u = D / 2.0 * kN;
    const int i = std::min(kN - 1, static_cast<int>(u));
    const double w = u - i;
    return values[i] * (1.0 - w) + values[i + 1] * w;
  }
};

const PairEnergyTable& pair_table(int d) {
  static std::array<std::unique_ptr<PairEnergyTable>, kMaxDim + 1> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[static_cast<std::size_t>(d)];
  if (!slot) slot = std::make_unique<PairEnergyTable>(d);
  return *slot;
}

Point position_at(const Trajectory& t, double time) {
  const double u = time / t.step_h;
  const auto i = std::min(static_cast<std::size_t>(u), t.size() - 2);
  const double w = std::clamp(u - double(i), 0.0, 1.0);
  return t.point(i) * (1.0 - w) + t.point(i + 1) * w;
}

}  // namespace

double ball_pair_energy(int d, double D) {
  require_dim(d);
  if (!(D >= 0.0)) throw DomainError("distance must be nonnegative");
  const double v = unit_ball_volume(d);
  if (D >= 2.0) return v * v * green_constant(d) * std::pow(D, 2 - d);
  return pair_table(d).at(D);
}

double pair_green_energy(const Trajectory& ti, const Trajectory& tj, double L, const RngSpec& spec,
                         std::size_t n_samples) {
  const int d = ti.dim;
  if (d < 5) throw DomainError("pair_green_energy requires d >= 5");
  if (tj.dim != d) throw DomainError("trajectory dimensions differ");
  if (!(L >= 2.0)) throw DomainError("pair_green_energy requires L >= 2");
  for (const Trajectory* t : {&ti, &tj}) {
    if (t->size() < 2 || double(t->size() - 1) * t->step_h < L * (1.0 - 1e-9)) {
      throw DomainError("trajectory does not cover [0, L]");
    }
  }
  Rng rng(spec);
  RunningStats acc;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double s = L * (0.5 + 0.5 * rng.uniform());
    const double t = L * (0.5 + 0.5 * rng.uniform());
    acc.add(ball_pair_energy(d, dist(position_at(ti, s), position_at(tj, t))));
  }
  return 0.25 * L * L * acc.mean();
}

RateEstimate pair_visit_rate(const Point& x, const Point& y, double alpha, const SimParams& sim,
                             const RngSpec& spec) {
  if (x == y) throw DomainError("pair_visit_rate needs distinct centers");
  const int d = x.dim();
  const double rad = 2.0 * model_constants(d).rho;
  BallShape target(y, rad);
  SimParams s = sim;
  s.rho_big = 2.0 * rad;
  s.rho_kill = 4.0 * s.rho_big;
  const WosConfig cfg = wos_config(target, s);
  const std::size_t n = s.n_walkers;
  const std::size_t chunks = (n + kWalkerChunk - 1) / kWalkerChunk;
  const auto parts = map_indices<std::uint64_t>(chunks, [&](std::size_t c) {
    Rng rng(spec.child(c));
    std::uint64_t hits = 0;
    const std::size_t hi = std::min(n, (c + 1) * kWalkerChunk);
    for (std::size_t i = c * kWalkerChunk; i < hi; ++i) {
      // Starts inside the second ball (overlapping case) count as immediate visits.
      const Point z = x + rad * rng.unit_vector(d);
      hits += wos_walk(target, z, cfg, rng) ? 1 : 0;
    }
    return hits;
  });
  std::uint64_t hits = 0;
  for (auto h : parts) hits += h;
  const double p = double(hits) / double(n);
  const double pref = 2.0 * alpha * cap_ball_closed_form(d, rad).value;
  return {pref * p, pref * binomial_sigma(p, n)};
}

}  // namespace brint
