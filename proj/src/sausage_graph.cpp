#include "brint/sausage_graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

namespace brint {

std::size_t SausageGraph::n_edges() const {
  std::size_t s = 0;
  for (const auto& a : adj) s += a.size();
  return s / 2;
}

bool SausageGraph::has_edge(std::uint32_t i, std::uint32_t j) const {
  return std::binary_search(adj[i].begin(), adj[i].end(), j);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> SausageGraph::edges() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t i = 0; i < adj.size(); ++i) {
    for (auto j : adj[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

SausageGraph make_graph(std::size_t n, double r, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  SausageGraph g;
  g.n_vertices = n;
  g.radius_r = r;
  g.adj.assign(n, {});
  g.ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.ids[i] = i;
  for (auto [i, j] : edges) {
    if (i == j) continue;
    g.adj[i].push_back(j);
    g.adj[j].push_back(i);
  }
  for (auto& a : g.adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return g;
}

namespace {

// Coordinates passed as raw pointers: this is the innermost loop of the graph build.
double seg_dist2(int d, const double* p0, const double* p1, const double* q0, const double* q1) {
  double a = 0.0, e = 0.0, f = 0.0, c = 0.0, b = 0.0;
  for (int i = 0; i < d; ++i) {
    const double u = p1[i] - p0[i], v = q1[i] - q0[i], w = p0[i] - q0[i];
    a += u * u;
    e += v * v;
    f += v * w;
    c += u * w;
    b += u * v;
  }
  double s = 0.0, t = 0.0;
  constexpr double tiny = 1e-300;
  if (a <= tiny && e <= tiny) {
    t = 0.0;
  } else if (a <= tiny) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else if (e <= tiny) {
    s = std::clamp(-c / a, 0.0, 1.0);
  } else {
    const double denom = a * e - b * b;
    s = denom > 1e-15 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
    t = (b * s + f) / e;
    if (t < 0.0) {
      t = 0.0;
      s = std::clamp(-c / a, 0.0, 1.0);
    } else if (t > 1.0) {
      t = 1.0;
      s = std::clamp((b - c) / a, 0.0, 1.0);
    }
  }
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    const double w = (p0[i] + s * (p1[i] - p0[i])) - (q0[i] + t * (q1[i] - q0[i]));
    sum += w * w;
  }
  return sum;
}

}  // namespace

double segment_segment_distance2(const Point& p0, const Point& p1, const Point& q0, const Point& q1) {
  return seg_dist2(p0.dim(), p0.coords().data(), p1.coords().data(), q0.coords().data(), q1.coords().data());
}

namespace {

struct Seg {
  std::uint32_t traj;
  std::uint32_t i0, i1;  // point indices (equal for an isolated point)
};

std::vector<Seg> path_segments(const Trajectory& t, std::uint32_t id) {
  std::vector<Seg> out;
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool joined_next = i + 1 < n && t.segment_joined(i);
    const bool joined_prev = i > 0 && t.segment_joined(i - 1);
    if (joined_next) out.push_back({id, std::uint32_t(i), std::uint32_t(i + 1)});
    else if (!joined_prev) out.push_back({id, std::uint32_t(i), std::uint32_t(i)});
  }
  return out;
}

using CellIndex = std::array<std::int32_t, kMaxDim>;

struct CellIndexHash {
  std::size_t operator()(const CellIndex& c) const {
    std::uint64_t h = 0x51ED270B27AB5A3DULL;
    for (auto v : c) h = mix64(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
    return static_cast<std::size_t>(h);
  }
};


}  // namespace

SausageGraph build_graph(const std::vector<const Trajectory*>& paths, double r, Exec exec) {
  const std::size_t n = paths.size();
  if (!(r > 0.0)) throw DomainError("sausage radius must be positive");
  if (n < 2) return make_graph(n, r, {});
  const int d = paths.front()->dim;
  std::vector<Seg> segs;
  double longest = 0.0;
  for (std::uint32_t k = 0; k < n; ++k) {
    auto s = path_segments(*paths[k], k);
    for (const auto& q : s) longest = std::max(longest, dist(paths[k]->point(q.i0), paths[k]->point(q.i1)));
    segs.insert(segs.end(), s.begin(), s.end());
  }
  const double cell = 2.0 * r + longest;
  const double thr2 = 4.0 * r * r;
  std::unordered_map<CellIndex, std::vector<std::uint32_t>, CellIndexHash> grid;
  for (std::uint32_t e = 0; e < segs.size(); ++e) {
    const auto& q = segs[e];
    const auto& t = *paths[q.traj];
    CellIndex key{};
    const double* a = t.raw(q.i0).data();
    const double* b = t.raw(q.i1).data();
    for (int k = 0; k < d; ++k) key[k] = static_cast<std::int32_t>(std::floor(0.5 * (a[k] + b[k]) / cell));
    grid[key].push_back(e);
  }
  std::vector<CellIndex> keys;
  keys.reserve(grid.size());
  for (const auto& kv : grid) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());

  // Neighbour offsets in {-1,0,1}^d, keeping the lexicographically nonnegative half.
  std::vector<CellIndex> offsets;
  {
    CellIndex o{};
    for (int k = 0; k < d; ++k) o[k] = -1;
    for (;;) {
      int first = 0;
      for (int k = 0; k < d; ++k) {
        if (o[k] != 0) {
          first = o[k];
          break;
        }
      }
      if (first >= 0) offsets.push_back(o);
      int k = 0;
      while (k < d && ++o[k] > 1) o[k++] = -1;
      if (k == d) break;
    }
  }

  // Midpoint and half length per segment. Two segments are farther than 2r apart
  // whenever |m - m'| > 2r + l + l', which settles most candidate pairs cheaply;
  // the slack keeps that rejection conservative under rounding.
  std::vector<double> mid(segs.size() * std::size_t(d)), half(segs.size());
  for (std::size_t e = 0; e < segs.size(); ++e) {
    const double* a = paths[segs[e].traj]->raw(segs[e].i0).data();
    const double* b = paths[segs[e].traj]->raw(segs[e].i1).data();
    double l2 = 0.0;
    for (int k = 0; k < d; ++k) {
      mid[e * d + k] = 0.5 * (a[k] + b[k]);
      l2 += (b[k] - a[k]) * (b[k] - a[k]);
    }
    half[e] = 0.5 * std::sqrt(l2);
  }
  auto close = [&](std::uint32_t e, std::uint32_t f) {
    const double reach = (2.0 * r + half[e] + half[f]) * (1.0 + 1e-9);
    double m2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double t = mid[e * d + k] - mid[f * d + k];
      m2 += t * t;
    }
    if (m2 > reach * reach) return false;
    const auto& q = segs[e];
    const auto& w = segs[f];
    return seg_dist2(d, paths[q.traj]->raw(q.i0).data(), paths[q.traj]->raw(q.i1).data(),
                     paths[w.traj]->raw(w.i0).data(), paths[w.traj]->raw(w.i1).data()) <= thr2;
  };

  // Pairs already linked, shared by all cells so no pair is searched twice.
  if (n > 200'000) throw ConfigurationError("build_graph: too many trajectories for the pair table");
  auto pair_bit = [n](std::uint32_t i, std::uint32_t j) {
    if (i > j) std::swap(i, j);
    return std::size_t(i) * (2 * n - i - 1) / 2 + (j - i - 1);
  };
  std::vector<std::atomic<std::uint64_t>> linked((n * (n - 1) / 2 + 63) / 64);
  auto is_linked = [&](std::uint32_t i, std::uint32_t j) {
    const std::size_t bit = pair_bit(i, j);
    return (linked[bit / 64].load(std::memory_order_relaxed) >> (bit % 64)) & 1u;
  };
  auto link = [&](std::uint32_t i, std::uint32_t j) {
    const std::size_t bit = pair_bit(i, j);
    linked[bit / 64].fetch_or(std::uint64_t(1) << (bit % 64), std::memory_order_relaxed);
  };

  // Segments of one trajectory are contiguous within a cell; split each cell into
  // such runs so that an already linked pair of runs is skipped at once.
  struct Run {
    std::uint32_t traj, begin, end;
    std::array<double, kMaxDim> lo, hi;  // bounding box of the run's points
  };
  std::unordered_map<CellIndex, std::vector<Run>, CellIndexHash> runs;
  for (const auto& [key, list] : grid) {
    auto& out = runs[key];
    for (std::uint32_t y = 0; y < list.size();) {
      std::uint32_t z = y + 1;
      while (z < list.size() && segs[list[z]].traj == segs[list[y]].traj) ++z;
      Run run{segs[list[y]].traj, y, z, {}, {}};
      run.lo.fill(std::numeric_limits<double>::infinity());
      run.hi.fill(-std::numeric_limits<double>::infinity());
      for (auto w = y; w < z; ++w) {
        const auto& q = segs[list[w]];
        for (auto idx : {q.i0, q.i1}) {
          const double* c = paths[q.traj]->raw(idx).data();
          for (int k = 0; k < d; ++k) {
            run.lo[k] = std::min(run.lo[k], c[k]);
            run.hi[k] = std::max(run.hi[k], c[k]);
          }
        }
      }
      out.push_back(run);
      y = z;
    }
  }

  for_each_index(
      keys.size(),
      [&](std::size_t ci) {
        const auto& A = grid.at(keys[ci]);
        const auto& RA = runs.at(keys[ci]);
        for (const auto& off : offsets) {
          CellIndex nb = keys[ci];
          for (int k = 0; k < d; ++k) nb[k] += off[k];
          auto it = grid.find(nb);
          if (it == grid.end()) continue;
          const auto& B = it->second;
          const auto& RB = runs.at(nb);
          // Within one cell only distinct runs meet, each unordered pair once.
          const bool same = off == CellIndex{};
          for (std::size_t u = 0; u < RA.size(); ++u) {
            for (std::size_t v = same ? u + 1 : 0; v < RB.size(); ++v) {
              const auto ta = RA[u].traj, tb = RB[v].traj;
              if (ta == tb || is_linked(ta, tb)) continue;
              double gap2 = 0.0;
              for (int k = 0; k < d; ++k) {
                const double g = std::max({0.0, RA[u].lo[k] - RB[v].hi[k], RB[v].lo[k] - RA[u].hi[k]});
                gap2 += g * g;
              }
              if (gap2 > thr2 * (1.0 + 1e-9)) continue;
              bool hit = false;
              for (auto x = RA[u].begin; x < RA[u].end && !hit; ++x) {
                for (auto y = RB[v].begin; y < RB[v].end; ++y) {
                  if (close(A[x], B[y])) {
                    hit = true;
                    break;
                  }
                }
              }
              if (hit) link(ta, tb);
            }
          }
        }
      },
      exec);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (is_linked(i, j)) edges.emplace_back(i, j);
    }
  }
  return make_graph(n, r, std::move(edges));
}

SausageGraph build_graph_brute(const std::vector<const Trajectory*>& paths, double r) {
  const std::size_t n = paths.size();
  std::vector<std::vector<Seg>> segs(n);
  for (std::uint32_t k = 0; k < n; ++k) segs[k] = path_segments(*paths[k], k);
  const double thr2 = 4.0 * r * r;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      bool hit = false;
      for (const auto& a : segs[i]) {
        for (const auto& b : segs[j]) {
          if (seg_dist2(paths[i]->dim, paths[i]->raw(a.i0).data(), paths[i]->raw(a.i1).data(),
                        paths[j]->raw(b.i0).data(), paths[j]->raw(b.i1).data()) <= thr2) {
            hit = true;
            break;
          }
        }
        if (hit) break;
      }
      if (hit) edges.emplace_back(i, j);
    }
  }
  return make_graph(n, r, std::move(edges));
}

SausageGraph build_graph(const WindowSample& s, double alpha, Exec exec) {
  std::vector<const Trajectory*> paths;
  std::vector<std::uint64_t> ids;
  for (const auto& t : s.trajectories) {
    if (t.label <= alpha) {
      paths.push_back(&t.path);
      ids.push_back(t.id);
    }
  }
  SausageGraph g = build_graph(paths, s.radius_r, exec);
  g.ids = std::move(ids);
  return g;
}

std::vector<int> bfs_distances(const SausageGraph& g, std::uint32_t source) {
  std::vector<int> dist(g.n_vertices, kUnreachable);
  if (source >= g.n_vertices) throw DomainError("BFS source out of range");
  std::deque<std::uint32_t> q{source};
  dist[source] = 0;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    for (auto v : g.adj[u]) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
    }
  }
  return dist;
}

std::vector<std::vector<int>> graph_distances(const SausageGraph& g, const std::vector<std::uint32_t>& sources) {
  std::vector<std::vector<int>> out;
  out.reserve(sources.size());
  for (auto s : sources) out.push_back(bfs_distances(g, s));
  return out;
}

Trajectory cut_at_radius(const Trajectory& t, const Point& c, double rho) {
  const double r2 = rho * rho;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (dist2(t.point(i), c) >= r2) return t.prefix(i + 1);
  }
  return t;
}

std::vector<DiameterRow> diameter_probe(const WindowSample& s, double alpha, const BoxRegion& inner,
                                        const std::vector<double>& ladder, Exec exec) {
  if (!s.window.contains_region(inner)) throw DomainError("inner region must lie inside the window");
  const int sd = s_d(s.window.dim());
  std::vector<const LabeledTrajectory*> kept;
  for (const auto& t : s.trajectories) {
    if (t.label <= alpha) kept.push_back(&t);
  }
  std::vector<DiameterRow> rows;
  for (double rho : ladder) {
    DiameterRow row;
    row.rho_esc = rho;
    row.n_vertices = kept.size();
    std::vector<Trajectory> cut;
    cut.reserve(kept.size());
    for (const auto* t : kept) cut.push_back(cut_at_radius(t->path, s.window.center, rho));
    std::vector<const Trajectory*> ptrs;
    for (const auto& c : cut) ptrs.push_back(&c);
    std::vector<std::uint32_t> qual;
    for (std::uint32_t i = 0; i < cut.size(); ++i) {
      if (path_region_distance(cut[i], inner) <= s.radius_r) qual.push_back(i);
    }
    row.n_qualifying = qual.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (qual.size() < 2) {
      row.frac_le_sd = row.frac_ge2 = row.frac_unreachable = nan;
      rows.push_back(std::move(row));
      continue;
    }
    const SausageGraph g = build_graph(ptrs, s.radius_r, exec);
    std::uint64_t le_sd = 0, ge2 = 0;
    for (std::size_t a = 0; a < qual.size(); ++a) {
      const auto dist = bfs_distances(g, qual[a]);
      for (std::size_t b = a + 1; b < qual.size(); ++b) {
        const int h = dist[qual[b]];
        ++row.n_pairs;
        if (h == kUnreachable) {
          ++row.unreachable;
          ++ge2;
          continue;
        }
        if (row.hop_counts.size() <= std::size_t(h)) row.hop_counts.resize(std::size_t(h) + 1, 0);
        ++row.hop_counts[std::size_t(h)];
        if (h <= sd) ++le_sd;
        if (h >= 2) ++ge2;
      }
    }
    const double np = double(row.n_pairs);
    row.frac_le_sd = double(le_sd) / np;
    row.frac_ge2 = double(ge2) / np;
    row.frac_unreachable = double(row.unreachable) / np;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace brint
