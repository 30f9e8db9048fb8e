#include "brint/percolation.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>

#include "brint/parallel.hpp"
#include "brint/shape.hpp"

namespace brint {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

OccupancyGrid::OccupancyGrid(const Point& c, double a, int half_cells) : d(c.dim()), center(c), spacing(a), n(half_cells) {
  if (!(a > 0.0)) throw DomainError("grid spacing must be positive");
  if (half_cells < 0) throw DomainError("grid extent must be nonnegative");
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= std::size_t(side());
  cell.assign(total, kVacant);
}

OccupancyGrid OccupancyGrid::from_labels(const Point& c, double a, int half_cells, const std::vector<double>& labels) {
  OccupancyGrid g(c, a, half_cells);
  if (labels.size() != g.size()) throw DomainError("label count does not match the grid");
  for (double l : labels) {
    if (l != kInf) g.levels.push_back(l);
  }
  std::sort(g.levels.begin(), g.levels.end());
  g.levels.erase(std::unique(g.levels.begin(), g.levels.end()), g.levels.end());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] == kInf) continue;
    g.cell[k] = std::uint32_t(std::lower_bound(g.levels.begin(), g.levels.end(), labels[k]) - g.levels.begin());
  }
  return g;
}

double OccupancyGrid::label(std::size_t idx) const {
  const std::uint32_t c = cell[idx];
  return c == kVacant ? kInf : levels[c];
}

std::size_t OccupancyGrid::index(const std::array<int, kMaxDim>& i) const {
  std::size_t idx = 0;
  for (int j = 0; j < d; ++j) idx = idx * std::size_t(side()) + std::size_t(i[j]);
  return idx;
}

std::array<int, kMaxDim> OccupancyGrid::coords(std::size_t idx) const {
  std::array<int, kMaxDim> out{};
  const auto s = std::size_t(side());
  for (int j = d - 1; j >= 0; --j) {
    out[j] = int(idx % s);
    idx /= s;
  }
  return out;
}

Point OccupancyGrid::cell_center(std::size_t idx) const {
  const auto i = coords(idx);
  Point p = center;
  for (int j = 0; j < d; ++j) p[j] += spacing * (i[j] - n);
  return p;
}

std::vector<std::uint8_t> OccupancyGrid::occupied_bits(double alpha) const {
  std::vector<std::uint8_t> out(size());
  for (std::size_t k = 0; k < size(); ++k) out[k] = label(k) <= alpha;
  return out;
}

double OccupancyGrid::occupied_fraction(double alpha) const {
  if (cell.empty()) return 0.0;
  std::size_t k = 0;
  for (std::size_t idx = 0; idx < size(); ++idx) k += label(idx) <= alpha;
  return double(k) / double(size());
}

int OccupancyGrid::shell(std::size_t idx) const {
  const auto i = coords(idx);
  int m = 0;
  for (int j = 0; j < d; ++j) m = std::max(m, std::abs(i[j] - n));
  return m;
}

namespace {

// Marks every cell of axis-0 slab [lo, hi) within r of segment ab. The
// capsule is convex, so along each grid row parallel to the last axis the
// covered cells form one run: the hull of the runs cut by the two end balls
// and by the cylinder. Ends that fall within rounding distance of a cell
// center are settled with the exact distance test.
void cover_segment(OccupancyGrid& g, const Point& a, const Point& b, double r, std::uint32_t rank, int lo, int hi) {
  const int d = g.d;
  const int K = d - 1;
  std::array<int, kMaxDim> first{}, last{};
  for (int j = 0; j < d; ++j) {
    const double mn = std::min(a[j], b[j]) - r - g.center[j];
    const double mx = std::max(a[j], b[j]) + r - g.center[j];
    first[j] = std::max(0, int(std::ceil(mn / g.spacing)) + g.n);
    last[j] = std::min(g.side() - 1, int(std::floor(mx / g.spacing)) + g.n);
    if (first[j] > last[j]) return;
  }
  first[0] = std::max(first[0], lo);
  last[0] = std::min(last[0], hi - 1);
  if (first[0] > last[0]) return;
  const double r2 = r * r;
  std::array<double, kMaxDim> u{};
  double uu = 0.0;
  for (int j = 0; j < d; ++j) {
    u[j] = b[j] - a[j];
    uu += u[j] * u[j];
  }
  const double inv_uu = uu > 0.0 ? 1.0 / uu : 0.0;
  const double A = 1.0 - u[K] * u[K] * inv_uu;
  const bool tilted = uu > 0.0 && A > 1e-12;
  const double inv_2A = tilted ? 0.5 / A : 0.0;
  const double inv_uK = u[K] != 0.0 ? 1.0 / u[K] : 0.0;
  const double inv_a = 1.0 / g.spacing;
  const double a0 = g.center[K] - g.spacing * g.n;  // last-axis coordinate of index 0
  constexpr double kTie = 1e-7;
  Point p(d);
  auto covered = [&](int k) {
    p[K] = a0 + g.spacing * k;
    return point_segment_distance2(p, a, b) <= r2;
  };
  std::array<int, kMaxDim> i = first;
  while (true) {
    double Sa = 0.0, Sb = 0.0, Wu = 0.0;
    for (int j = 0; j < K; ++j) {
      p[j] = g.center[j] + g.spacing * (i[j] - g.n);
      const double wa = p[j] - a[j], wb = p[j] - b[j];
      Sa += wa * wa;
      Sb += wb * wb;
      Wu += wa * u[j];
    }
    // Covered x-range on the last axis.
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    auto take = [&](double x, double y) {
      if (x <= y) {
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, y);
      }
    };
    if (Sa <= r2) {
      const double h = std::sqrt(r2 - Sa);
      take(a[K] - h, a[K] + h);
    }
    if (Sb <= r2) {
      const double h = std::sqrt(r2 - Sb);
      take(b[K] - h, b[K] + h);
    }
    if (uu > 0.0) {
      // y = x - a_K; the foot parameter (Wu + y u_K) / uu must lie in [0, 1].
      const double C = Sa - Wu * Wu * inv_uu - r2;
      double ylo = -std::numeric_limits<double>::infinity(), yhi = -ylo;
      if (u[K] != 0.0) {
        ylo = -Wu * inv_uK;
        yhi = (uu - Wu) * inv_uK;
        if (ylo > yhi) std::swap(ylo, yhi);
      } else if (Wu < 0.0 || Wu > uu) {
        ylo = 1.0;
        yhi = 0.0;
      }
      if (tilted) {
        const double B = -2.0 * Wu * u[K] * inv_uu;
        const double disc = B * B - 4.0 * A * C;
        if (disc >= 0.0) {
          const double sq = std::sqrt(disc);
          take(a[K] + std::max(ylo, (-B - sq) * inv_2A), a[K] + std::min(yhi, (-B + sq) * inv_2A));
        }
      } else if (C <= 0.0) {
        take(a[K] + ylo, a[K] + yhi);
      }
    }
    if (xlo <= xhi) {
      const double flo = (xlo - a0) * inv_a, fhi = (xhi - a0) * inv_a;
      int klo = std::max(first[K], int(std::ceil(flo)));
      int khi = std::min(last[K], int(std::floor(fhi)));
      if (std::abs(flo - std::round(flo)) < kTie) {
        while (klo > first[K] && covered(klo - 1)) --klo;
        while (klo <= khi && !covered(klo)) ++klo;
      }
      if (std::abs(fhi - std::round(fhi)) < kTie) {
        while (khi < last[K] && covered(khi + 1)) ++khi;
        while (khi >= klo && !covered(khi)) --khi;
      }
      if (klo <= khi) {
        i[K] = klo;
        std::uint32_t* row = &g.cell[g.index(i)];
        for (int k = 0; k <= khi - klo; ++k) row[k] = std::min(row[k], rank);
      }
    }
    int j = K - 1;
    while (j >= 0 && i[j] == last[j]) {
      i[j] = first[j];
      --j;
    }
    if (j < 0) break;
    ++i[j];
  }
}

// Fills g.levels with the kept labels in increasing order and returns the
// rank of every trajectory (kVacant when its label exceeds alpha).
std::vector<std::uint32_t> rank_trajectories(OccupancyGrid& g, const WindowSample& s, double alpha) {
  if (s.window.dim() != g.d) throw DomainError("grid and sample dimensions differ");
  if (alpha > s.alpha_max) throw DomainError("level exceeds the sampled alpha_max");
  if (!g.levels.empty()) throw DomainError("grid already holds a rasterized sample");
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.trajectories[k].label <= alpha) kept.push_back(k);
  }
  if (kept.size() >= OccupancyGrid::kVacant) throw DomainError("too many trajectories for one grid");
  std::stable_sort(kept.begin(), kept.end(),
                   [&](std::size_t x, std::size_t y) { return s.trajectories[x].label < s.trajectories[y].label; });
  std::vector<std::uint32_t> rank(s.size(), OccupancyGrid::kVacant);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    rank[kept[k]] = std::uint32_t(k);
    g.levels.push_back(s.trajectories[kept[k]].label);
  }
  return rank;
}

void cover_sample(OccupancyGrid& g, const WindowSample& s, const std::vector<std::uint32_t>& rank, int lo, int hi) {
  const double r = s.radius_r;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (rank[k] == OccupancyGrid::kVacant) continue;
    const Trajectory& t = s.trajectories[k].path;
    std::size_t next_break = 0;
    bool prev_joined = false;
    Point x = t.size() ? t.point(0) : Point(g.d), y(g.d);
    for (std::size_t i = 0; i < t.size(); ++i) {
      while (next_break < t.breaks.size() && t.breaks[next_break] <= i) ++next_break;
      const bool joined = i + 1 < t.size() && !(next_break < t.breaks.size() && t.breaks[next_break] == i + 1);
      if (joined) {
        for (int j = 0; j < g.d; ++j) y[j] = t.xs[(i + 1) * std::size_t(g.d) + std::size_t(j)];
        cover_segment(g, x, y, r, rank[k], lo, hi);
      } else if (!prev_joined) {
        cover_segment(g, x, x, r, rank[k], lo, hi);
      }
      prev_joined = joined;
      if (i + 1 < t.size()) {
        for (int j = 0; j < g.d; ++j) x[j] = t.xs[(i + 1) * std::size_t(g.d) + std::size_t(j)];
      }
    }
  }
}

}  // namespace

void rasterize_into(OccupancyGrid& g, const WindowSample& s, double alpha, Exec exec) {
  const auto rank = rank_trajectories(g, s, alpha);
  const int side = g.side();
  const int parts = exec == Exec::serial ? 1 : std::min(side, std::max(1, num_threads()) * 4);
  for_each_index(
      std::size_t(parts),
      [&](std::size_t k) {
        const int lo = int(std::size_t(side) * k / std::size_t(parts));
        const int hi = int(std::size_t(side) * (k + 1) / std::size_t(parts));
        cover_sample(g, s, rank, lo, hi);
      },
      exec);
}

void rasterize_reference(OccupancyGrid& g, const WindowSample& s, double alpha) {
  const auto rank = rank_trajectories(g, s, alpha);
  const double r2 = s.radius_r * s.radius_r;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (rank[k] == OccupancyGrid::kVacant) continue;
    const Trajectory& t = s.trajectories[k].path;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const Point p = g.cell_center(idx);
      for (std::size_t i = 0; i < t.size(); ++i) {
        const bool joined = t.segment_joined(i);
        if (!joined && i > 0 && t.segment_joined(i - 1)) continue;
        const Point a = t.point(i);
        if (point_segment_distance2(p, a, joined ? t.point(i + 1) : a) <= r2) {
          g.cell[idx] = std::min(g.cell[idx], rank[k]);
          break;
        }
      }
    }
  }
}

OccupancyGrid rasterize(const WindowSample& s, double alpha, const BoxRegion& region, double spacing, Exec exec) {
  if (!(spacing > 0.0) || spacing > s.radius_r / 2.0) throw DomainError("grid spacing must lie in (0, r/2]");
  if (!s.window.contains_region(region)) throw DomainError("rasterized region must lie inside the window");
  const int n = int(std::floor(region.half_width / spacing + 1e-9));
  OccupancyGrid g(region.center, spacing, n);
  rasterize_into(g, s, alpha, exec);
  return g;
}

std::string to_string(CrossingMode m) {
  switch (m) {
    case CrossingMode::vacant_annulus: return "vacant_annulus";
    case CrossingMode::lattice: return "lattice";
    case CrossingMode::slab: return "slab";
    case CrossingMode::occupied: return "occupied";
  }
  return "?";
}

CrossingMode parse_crossing_mode(const std::string& s) {
  for (auto m : {CrossingMode::vacant_annulus, CrossingMode::lattice, CrossingMode::slab, CrossingMode::occupied}) {
    if (s == to_string(m)) return m;
  }
  if (s == "vacant") return CrossingMode::vacant_annulus;
  throw DomainError("unknown crossing mode '" + s + "'");
}

bool is_vacant_mode(CrossingMode m) { return m == CrossingMode::vacant_annulus || m == CrossingMode::lattice; }

CrossingGeometry annulus_geometry(const OccupancyGrid& g, double L, CrossingMode mode) {
  CrossingGeometry geo;
  if (mode == CrossingMode::lattice) {
    geo.inner = int(std::lround((L - 1.0) / g.spacing));
    geo.outer = int(std::lround(2.0 * L / g.spacing));
  } else {
    geo.inner = int(std::lround(L / g.spacing));
    geo.outer = int(std::lround(2.0 * L / g.spacing));
  }
  if (geo.inner < 0 || geo.inner >= geo.outer) throw DomainError("degenerate crossing annulus");
  if (geo.outer > g.n) throw DomainError("crossing annulus exceeds the grid");
  return geo;
}

namespace {

struct Walker {
  const OccupancyGrid& g;
  CrossingMode mode;
  CrossingGeometry geo;
  std::array<std::size_t, kMaxDim> stride{};

  Walker(const OccupancyGrid& grid, CrossingMode m, CrossingGeometry gm) : g(grid), mode(m), geo(gm) {
    if (geo.outer > g.n || geo.inner < 0 || geo.inner >= geo.outer) throw DomainError("crossing geometry exceeds the grid");
    std::size_t s = 1;
    for (int j = g.d - 1; j >= 0; --j) {
      stride[j] = s;
      s *= std::size_t(g.side());
    }
  }

  int shell_of(const std::array<int, kMaxDim>& i) const {
    int m = 0;
    for (int j = 0; j < g.d; ++j) m = std::max(m, std::abs(i[j] - g.n));
    return m;
  }
  bool allowed(const std::array<int, kMaxDim>& i) const {
    const int sh = shell_of(i);
    if (sh < geo.inner || sh > geo.outer) return false;
    if (mode == CrossingMode::slab) {
      for (int j = 2; j < g.d; ++j) {
        if (std::abs(i[j] - g.n) > 1) return false;
      }
    }
    return true;
  }
  bool open(std::size_t idx, double alpha) const {
    return is_vacant_mode(mode) ? g.label(idx) > alpha : g.label(idx) <= alpha;
  }
  template <class F>
  void neighbours(std::size_t idx, const std::array<int, kMaxDim>& i, F&& f) const {
    for (int j = 0; j < g.d; ++j) {
      for (int s : {-1, 1}) {
        auto k = i;
        k[j] += s;
        if (k[j] < 0 || k[j] >= g.side() || !allowed(k)) continue;
        f(s < 0 ? idx - stride[j] : idx + stride[j], k);
      }
    }
  }
};

struct Dsu {
  std::vector<std::int64_t> parent;
  explicit Dsu(std::size_t n) : parent(n, -1) {}
  bool present(std::size_t x) const { return parent[x] >= 0; }
  void add(std::size_t x) { parent[x] = std::int64_t(x); }
  std::size_t find(std::size_t x) {
    while (std::size_t(parent[x]) != x) {
      parent[x] = parent[std::size_t(parent[x])];
      x = std::size_t(parent[x]);
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::int64_t(std::min(a, b));
  }
};

}  // namespace

bool crossing_event(const OccupancyGrid& g, CrossingMode mode, const CrossingGeometry& geo, double alpha) {
  Walker w(g, mode, geo);
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::vector<std::size_t> queue;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto i = g.coords(idx);
    if (w.shell_of(i) == geo.inner && w.allowed(i) && w.open(idx, alpha)) {
      seen[idx] = 1;
      queue.push_back(idx);
    }
  }
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const std::size_t idx = queue[q];
    const auto i = g.coords(idx);
    if (w.shell_of(i) == geo.outer) return true;
    w.neighbours(idx, i, [&](std::size_t nb, const std::array<int, kMaxDim>&) {
      if (!seen[nb] && w.open(nb, alpha)) {
        seen[nb] = 1;
        queue.push_back(nb);
      }
    });
  }
  return false;
}

double critical_level(const OccupancyGrid& g, CrossingMode mode, const CrossingGeometry& geo) {
  Walker w(g, mode, geo);
  const bool vacant = is_vacant_mode(mode);
  // Vacant: cells open from the highest level down, never-covered cells
  // first; occupied: from the lowest level up. Ranks already follow the
  // level order, so a bucket pass sorts the cells.
  const std::size_t nb = g.levels.size() + 1;
  auto bucket = [&](std::size_t idx) -> std::size_t {
    const std::uint32_t c = g.cell[idx];
    if (c == OccupancyGrid::kVacant) return vacant ? 0 : nb;
    return vacant ? g.levels.size() - c : c;
  };
  std::vector<std::size_t> start(nb + 1, 0);
  std::size_t total = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const std::size_t bk = bucket(idx);
    if (bk < nb && w.allowed(g.coords(idx))) {
      ++start[bk + 1];
      ++total;
    }
  }
  for (std::size_t k = 0; k < nb; ++k) start[k + 1] += start[k];
  std::vector<std::size_t> cells(total);
  {
    auto pos = start;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const std::size_t bk = bucket(idx);
      if (bk < nb && w.allowed(g.coords(idx))) cells[pos[bk]++] = idx;
    }
  }
  const std::size_t S = g.size(), T = g.size() + 1;
  Dsu dsu(g.size() + 2);
  dsu.add(S);
  dsu.add(T);
  std::size_t k = 0;
  while (k < cells.size()) {
    const double level = g.label(cells[k]);
    for (; k < cells.size() && g.label(cells[k]) == level; ++k) {
      const std::size_t idx = cells[k];
      const auto i = g.coords(idx);
      dsu.add(idx);
      const int sh = w.shell_of(i);
      if (sh == geo.inner) dsu.unite(idx, S);
      if (sh == geo.outer) dsu.unite(idx, T);
      w.neighbours(idx, i, [&](std::size_t nb2, const std::array<int, kMaxDim>&) {
        if (dsu.present(nb2)) dsu.unite(idx, nb2);
      });
    }
    if (dsu.find(S) == dsu.find(T)) return level;
  }
  return vacant ? 0.0 : kInf;
}

bool crossing_from_level(double level, double alpha, CrossingMode mode) {
  return is_vacant_mode(mode) ? alpha < level : alpha >= level;
}

std::vector<std::array<long, kMaxDim>> discretize_path(const std::vector<Point>& poly) {
  std::vector<std::array<long, kMaxDim>> out;
  if (poly.empty()) return out;
  const int d = poly.front().dim();
  auto cell_of = [&](const Point& p) {
    std::array<long, kMaxDim> c{};
    for (int j = 0; j < d; ++j) c[j] = long(std::ceil(p[j] - 0.5));
    return c;
  };
  // Appends `next`, inserting one-coordinate moves in increasing index order.
  auto step_to = [&](const std::array<long, kMaxDim>& next) {
    auto cur = out.back();
    for (int j = 0; j < d; ++j) {
      if (cur[j] == next[j]) continue;
      cur[j] = next[j];
      out.push_back(cur);
    }
  };
  out.push_back(cell_of(poly.front()));
  for (std::size_t s = 0; s + 1 < poly.size(); ++s) {
    const Point& a = poly[s];
    const Point& b = poly[s + 1];
    auto cur = out.back();
    while (true) {
      // Next time any coordinate leaves the current cell (c - 1/2, c + 1/2].
      double tmin = kInf;
      for (int j = 0; j < d; ++j) {
        const double v = b[j] - a[j];
        if (v > 0.0) {
          const double t = (double(cur[j]) + 0.5 - a[j]) / v;
          if (t < 1.0) tmin = std::min(tmin, std::max(t, 0.0));
        } else if (v < 0.0) {
          const double t = (double(cur[j]) - 0.5 - a[j]) / v;
          if (t <= 1.0) tmin = std::min(tmin, std::max(t, 0.0));
        }
      }
      if (tmin == kInf) break;
      auto next = cur;
      for (int j = 0; j < d; ++j) {
        const double v = b[j] - a[j];
        if (v > 0.0 && (double(cur[j]) + 0.5 - a[j]) / v == tmin) ++next[j];
        if (v < 0.0 && (double(cur[j]) - 0.5 - a[j]) / v == tmin) --next[j];
      }
      if (next == cur) break;
      step_to(next);
      cur = next;
    }
    // Guards against rounding drift at the segment end.
    const auto end = cell_of(b);
    if (end != out.back()) step_to(end);
  }
  return out;
}

CrossingSetup CrossingSetup::resolved() const {
  CrossingSetup s = *this;
  require_dim(d);
  if (!(r > 0.0) || !(L > 0.0)) throw DomainError("crossing setup needs r > 0 and L > 0");
  if (mode == CrossingMode::lattice) {
    s.spacing = 1.0;
  } else if (s.spacing <= 0.0) {
    s.spacing = r / 2.0;
  }
  // Mean step length sqrt(h d) = r.
  if (s.sim.step_h <= 0.0) s.sim.step_h = r * r / d;
  return s;
}

BoxRegion CrossingSetup::window() const {
  Point c(d);
  return BoxRegion(c, 2.0 * L, NormTag::linf);
}

namespace {

OccupancyGrid replica_grid(const WindowSample& s, const CrossingSetup& st, double alpha) {
  if (st.mode == CrossingMode::lattice) {
    OccupancyGrid g(st.window().center, 1.0, int(std::floor(2.0 * st.L + 1e-9)));
    rasterize_into(g, s, alpha);
    return g;
  }
  return rasterize(s, alpha, st.window(), st.spacing);
}

WindowSampler make_sampler(const CrossingSetup& st, double alpha_max, const RngSpec& cap_rng) {
  WindowConfig cfg{st.window(), st.r, alpha_max, st.sim, PathMode::window, false};
  return WindowSampler(cfg, cap_rng);
}

}  // namespace

CrossingEstimate crossing_probability(double alpha, const CrossingSetup& setup, std::size_t M, const RngSpec& rng,
                                      Exec exec) {
  if (M < 100) throw DomainError("crossing_probability needs M >= 100");
  const CrossingSetup st = setup.resolved();
  const WindowSampler sampler = make_sampler(st, alpha, rng.child(0xCA9AC17E));
  const auto hits = map_indices<int>(
      M,
      [&](std::size_t i) {
        const WindowSample s = sampler.sample(rng.child(i + 1));
        const OccupancyGrid g = replica_grid(s, st, alpha);
        return int(crossing_event(g, st.mode, annulus_geometry(g, st.L, st.mode), alpha));
      },
      exec);
  CrossingEstimate e;
  e.alpha = alpha;
  e.L = st.L;
  e.mode = st.mode;
  e.n_replicas = M;
  e.successes = std::size_t(std::accumulate(hits.begin(), hits.end(), 0));
  e.p_hat = double(e.successes) / double(M);
  e.ci95 = binomial_ci95(e.successes, M);
  return e;
}

std::vector<double> replica_levels(const CrossingSetup& setup, double alpha_max, std::size_t M, const RngSpec& rng,
                                   CapacityEstimate* cap_out, Exec exec) {
  const CrossingSetup st = setup.resolved();
  const WindowSampler sampler = make_sampler(st, alpha_max, rng.child(0xCA9AC17E));
  if (cap_out) *cap_out = sampler.enlarged_cap();
  return map_indices<double>(
      M,
      [&](std::size_t i) {
        const WindowSample s = sampler.sample(rng.child(i + 1));
        const OccupancyGrid g = replica_grid(s, st, alpha_max);
        return critical_level(g, st.mode, annulus_geometry(g, st.L, st.mode));
      },
      exec);
}

ScanResult scan_from_levels(const std::vector<double>& alpha_grid, const CrossingSetup& setup,
                            std::vector<double> levels) {
  const CrossingSetup st = setup.resolved();
  ScanResult out;
  out.alphas = alpha_grid;
  out.levels = std::move(levels);
  const std::size_t M = out.levels.size();
  std::vector<double> p, w;
  for (double a : alpha_grid) {
    CrossingEstimate e;
    e.alpha = a;
    e.L = st.L;
    e.mode = st.mode;
    e.n_replicas = M;
    for (double lv : out.levels) e.successes += crossing_from_level(lv, a, st.mode);
    e.p_hat = M ? double(e.successes) / double(M) : 0.0;
    e.ci95 = binomial_ci95(e.successes, M);
    out.curve.push_back(e);
    p.push_back(e.p_hat);
    w.push_back(double(M));
  }
  out.p_iso = isotonic_regression(p, w, !is_vacant_mode(st.mode));
  out.alpha_half = interpolate_crossing(out.alphas, out.p_iso, 0.5);
  return out;
}

ScanResult threshold_scan(const std::vector<double>& alpha_grid, const CrossingSetup& setup, std::size_t M,
                          const RngSpec& rng, Exec exec) {
  if (alpha_grid.empty()) throw DomainError("empty level grid");
  if (!std::is_sorted(alpha_grid.begin(), alpha_grid.end()) ||
      std::adjacent_find(alpha_grid.begin(), alpha_grid.end()) != alpha_grid.end())
    throw DomainError("level grid must be strictly increasing");
  if (alpha_grid.front() < 0.0) throw DomainError("levels must be nonnegative");
  CapacityEstimate cap;
  auto levels = replica_levels(setup, alpha_grid.back(), M, rng, &cap, exec);
  ScanResult out = scan_from_levels(alpha_grid, setup, std::move(levels));
  out.window_cap = cap;
  return out;
}

ScalingReport scaling_check(double r1, double r2, const std::vector<double>& alpha_grid, const CrossingSetup& setup1,
                            std::size_t M, const RngSpec& rng, Exec exec) {
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw DomainError("radii must be positive");
  ScalingReport rep;
  rep.r1 = r1;
  rep.r2 = r2;
  auto at_radius = [&](double r) {
    const double lam = r / setup1.r;
    CrossingSetup st = setup1;
    st.r = r;
    st.L = setup1.L * lam;
    if (st.spacing > 0.0) st.spacing *= lam;
    if (st.sim.step_h > 0.0) st.sim.step_h *= lam * lam;
    st.sim.rho_big *= lam;
    st.sim.rho_kill *= lam;
    st.sim.rho_esc *= lam;
    st.sim.eps_hit *= lam;
    std::vector<double> grid = alpha_grid;
    for (double& a : grid) a *= std::pow(lam, 2.0 - setup1.d);
    // Seeds depend on the radius only, so equal radii share them.
    return threshold_scan(grid, st, M, rng.child(std::bit_cast<std::uint64_t>(r)), exec);
  };
  rep.scan1 = at_radius(r1);
  rep.scan2 = at_radius(r2);
  rep.target = std::pow(r2 / r1, 2.0 - setup1.d);
  if (rep.scan1.alpha_half && rep.scan2.alpha_half && *rep.scan1.alpha_half > 0.0)
    rep.ratio = *rep.scan2.alpha_half / *rep.scan1.alpha_half;
  return rep;
}

}  // namespace brint
