#include "brint/renorm.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "brint/shape.hpp"

namespace brint {

long linf_norm(const LatticePoint& z, int d) {
  long m = 0;
  for (int j = 0; j < d; ++j) m = std::max(m, std::labs(z[j]));
  return m;
}

long linf_dist(const LatticePoint& a, const LatticePoint& b, int d) {
  long m = 0;
  for (int j = 0; j < d; ++j) m = std::max(m, std::labs(a[j] - b[j]));
  return m;
}

ScaleLadder::ScaleLadder(long L0) : L0_(L0) {
  if (L0 < 1) throw DomainError("L0 must be a positive integer");
}

long ScaleLadder::level(int n) const {
  if (n < 0) throw DomainError("scale index must be nonnegative");
  long v = L0_;
  for (int i = 0; i < n; ++i) {
    if (v > std::numeric_limits<long>::max() / 6) throw DomainError("scale L_n overflows");
    v *= 6;
  }
  return v;
}

std::vector<LatticePoint> enumerate_child_offsets(int d, long radius) {
  require_dim(d, 1, kMaxDim);
  if (radius < 1) throw DomainError("offset radius must be >= 1");
  std::vector<LatticePoint> out;
  LatticePoint z{};
  for (int j = 0; j < d; ++j) z[j] = -radius;
  while (true) {
    if (linf_norm(z, d) == radius) out.push_back(z);
    int j = d - 1;
    while (j >= 0 && z[j] == radius) {
      z[j] = -radius;
      --j;
    }
    if (j < 0) break;
    ++z[j];
  }
  return out;
}

BigInt per_node_constant(int d) {
  return BigInt(enumerate_child_offsets(d, 6).size()) * BigInt(enumerate_child_offsets(d, 12).size());
}

BigInt count_embeddings(int d, int n) {
  if (n < 0) throw DomainError("tree depth must be nonnegative");
  if (n > 20) throw DomainError("tree depth too large for exact counting");
  return boost::multiprecision::pow(per_node_constant(d), unsigned((1u << n) - 1u));
}

BigInt count_embeddings_brute_depth1(int d, long L0) {
  require_dim(d, 1, 4);
  const ScaleLadder lad(L0);
  const long L1 = lad.level(1);
  const long R = 2 * L1;
  // Points of the raw lattice in the box, kept when they lie in L_0 Z^d.
  std::vector<LatticePoint> pts;
  LatticePoint z{};
  for (int j = 0; j < d; ++j) z[j] = -R;
  while (true) {
    bool on = true;
    for (int j = 0; j < d; ++j) on = on && z[j] % L0 == 0;
    if (on) pts.push_back(z);
    int j = d - 1;
    while (j >= 0 && z[j] == R) {
      z[j] = -R;
      --j;
    }
    if (j < 0) break;
    ++z[j];
  }
  std::uint64_t first = 0, second = 0;
  for (const auto& p : pts) {
    const long r = linf_norm(p, d);
    first += r == L1;
    second += r == 2 * L1;
  }
  // The two children are chosen independently, so the pair count is the product.
  return BigInt(first) * BigInt(second);
}

std::string to_string(EmbeddingTarget t) { return t == EmbeddingTarget::slab ? "slab" : "full_lattice"; }

std::vector<LatticePoint> ProperEmbedding::leaves() const {
  return {map.begin() + std::ptrdiff_t(first_leaf()), map.end()};
}

int node_depth(std::size_t node) {
  if (node == 0) throw DomainError("node index starts at 1");
  int k = 0;
  while (node > 1) {
    node >>= 1;
    ++k;
  }
  return k;
}

int lexical_distance(std::size_t m, std::size_t mp) {
  if (node_depth(m) != node_depth(mp)) throw DomainError("lexical distance needs leaves of equal depth");
  std::size_t x = m ^ mp;
  int k = 0;
  while (x) {
    x >>= 1;
    ++k;
  }
  return k;
}

std::vector<std::size_t> leaves_at_distance(int n, std::size_t m, int k) {
  std::vector<std::size_t> out;
  const std::size_t lo = std::size_t(1) << n, hi = lo << 1;
  for (std::size_t mp = lo; mp < hi; ++mp) {
    if (lexical_distance(m, mp) == k) out.push_back(mp);
  }
  return out;
}

namespace {

const std::vector<LatticePoint>& offsets_cached(int d, long radius) {
  thread_local std::map<std::pair<int, long>, std::vector<LatticePoint>> cache;
  auto key = std::make_pair(d, radius);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, enumerate_child_offsets(d, radius)).first;
  return it->second;
}

bool on_lattice(const LatticePoint& p, long s, int d) {
  for (int j = 0; j < d; ++j) {
    if (p[j] % s != 0) return false;
  }
  return true;
}

LatticePoint add_scaled(const LatticePoint& x, const LatticePoint& z, long s, int d) {
  LatticePoint y = x;
  for (int j = 0; j < d; ++j) y[j] += s * z[j];
  return y;
}

}  // namespace

ProperEmbedding sample_embedding(int d, int n, long L0, const LatticePoint& root, EmbeddingTarget target, Rng& rng) {
  require_dim(d, 2, kMaxDim);
  if (n < 0 || n > 20) throw DomainError("tree depth out of range");
  const ScaleLadder lad(L0);
  if (!on_lattice(root, lad.level(n), d)) throw DomainError("root must lie in L_n Z^d");
  const int od = target == EmbeddingTarget::slab ? 2 : d;
  if (target == EmbeddingTarget::slab) {
    for (int j = 2; j < d; ++j) {
      if (root[j] != 0) throw DomainError("slab root must lie in Z^2 x {0}");
    }
  }
  ProperEmbedding e;
  e.d = d;
  e.n = n;
  e.L0 = L0;
  e.target = target;
  e.map.assign(std::size_t(2) << n, LatticePoint{});
  e.map[1] = root;
  const auto& near = offsets_cached(od, 6);
  const auto& far = offsets_cached(od, 12);
  for (std::size_t m = 1; m < e.first_leaf(); ++m) {
    const long s = lad.level(n - node_depth(m) - 1);
    e.map[2 * m] = add_scaled(e.map[m], near[rng.below(near.size())], s, d);
    e.map[2 * m + 1] = add_scaled(e.map[m], far[rng.below(far.size())], s, d);
  }
  return e;
}

AuditResult audit_embedding(const ProperEmbedding& e) {
  const ScaleLadder lad(e.L0);
  auto fail = [](std::string why) { return AuditResult{false, std::move(why)}; };
  if (e.map.size() != (std::size_t(2) << e.n)) return fail("node table has the wrong size");
  for (std::size_t m = 1; m < e.map.size(); ++m) {
    const int k = node_depth(m);
    if (!on_lattice(e.map[m], lad.level(e.n - k), e.d)) return fail("node " + std::to_string(m) + " off its lattice");
    if (e.target == EmbeddingTarget::slab) {
      for (int j = 2; j < e.d; ++j) {
        if (e.map[m][j] != 0) return fail("node " + std::to_string(m) + " leaves the slab");
      }
    }
    if (m >= e.first_leaf()) continue;
    const long L = lad.level(e.n - k);
    if (linf_dist(e.map[2 * m], e.map[m], e.d) != L) return fail("first child of node " + std::to_string(m));
    if (linf_dist(e.map[2 * m + 1], e.map[m], e.d) != 2 * L) return fail("second child of node " + std::to_string(m));
  }
  return {};
}

long sphere_min_dist2(const LatticePoint& a, const LatticePoint& b, long rho, int d) {
  if (linf_dist(a, b, d) > 2 * rho) {
    // Disjoint boxes: the closest points are boundary lattice points.
    long s = 0;
    for (int j = 0; j < d; ++j) {
      const long g = std::max(0L, std::labs(a[j] - b[j]) - 2 * rho);
      s += g * g;
    }
    return s;
  }
  double count = 1.0;
  for (int j = 0; j < d; ++j) count *= double(2 * rho + 1);
  if (count > 1e6) return 0;  // conservative for overlapping large boxes
  long best = std::numeric_limits<long>::max();
  LatticePoint y{};
  for (int j = 0; j < d; ++j) y[j] = a[j] - rho;
  while (true) {
    if (linf_dist(y, a, d) == rho) {
      long s = 0;
      if (linf_dist(y, b, d) > rho) {
        for (int j = 0; j < d; ++j) {
          const long g = std::max(0L, std::labs(y[j] - b[j]) - rho);
          s += g * g;
        }
      } else {
        long gap = rho;
        for (int j = 0; j < d; ++j) gap = std::min(gap, rho - std::labs(y[j] - b[j]));
        s = gap * gap;
      }
      best = std::min(best, s);
    }
    int j = d - 1;
    while (j >= 0 && y[j] == a[j] + rho) {
      y[j] = a[j] - rho;
      --j;
    }
    if (j < 0) break;
    ++y[j];
  }
  return best;
}

bool verify_spreadout(const ProperEmbedding& e) {
  const ScaleLadder lad(e.L0);
  const std::size_t lo = e.first_leaf(), hi = e.map.size();
  for (std::size_t m = lo; m < hi; ++m) {
    for (std::size_t mp = m + 1; mp < hi; ++mp) {
      const int k = lexical_distance(m, mp);
      const long need = lad.level(k - 1);
      if (sphere_min_dist2(e.map[m], e.map[mp], e.L0 - 1, e.d) < need * need) return false;
    }
  }
  return true;
}

bool path_meets_sphere(const std::vector<LatticePoint>& path, const LatticePoint& c, long R, int d) {
  for (const auto& p : path) {
    if (linf_dist(p, c, d) == R) return true;
  }
  return false;
}

bool leaves_on_path(const ProperEmbedding& e, const std::vector<LatticePoint>& path) {
  for (std::size_t m = e.first_leaf(); m < e.map.size(); ++m) {
    if (!path_meets_sphere(path, e.map[m], e.L0 - 1, e.d)) return false;
  }
  return true;
}

namespace {

struct Extractor {
  const std::vector<LatticePoint>& path;
  int d;
  int n;
  ScaleLadder lad;
  ProperEmbedding& e;

  // Distance from the path to c, for candidate ordering.
  long path_dist(const LatticePoint& c) const {
    long best = std::numeric_limits<long>::max();
    for (const auto& p : path) best = std::min(best, linf_dist(p, c, d));
    return best;
  }

  bool admissible(const LatticePoint& y, int depth) const {
    if (depth == n) return path_meets_sphere(path, y, lad.L0() - 1, d);
    const long L = lad.level(n - depth);
    return path_meets_sphere(path, y, L - 1, d) && path_meets_sphere(path, y, 2 * L, d);
  }

  bool solve(std::size_t m) {
    const int k = node_depth(m);
    if (k == n) return true;
    const long s = lad.level(n - k - 1);
    const int od = e.target == EmbeddingTarget::slab ? 2 : d;
    for (int c = 0; c < 2; ++c) {
      const auto& offs = offsets_cached(od, c == 0 ? 6 : 12);
      std::vector<std::pair<long, LatticePoint>> cand;
      for (const auto& z : offs) {
        const LatticePoint y = add_scaled(e.map[m], z, s, d);
        if (admissible(y, k + 1)) cand.emplace_back(path_dist(y), y);
      }
      std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      bool found = false;
      const std::size_t child = 2 * m + std::size_t(c);
      // The two subtrees impose no constraint on each other, so each child is
      // searched on its own.
      for (const auto& [dist, y] : cand) {
        e.map[child] = y;
        if (solve(child)) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }
};

}  // namespace

ProperEmbedding extract_embedding_from_path(const std::vector<LatticePoint>& path, int d, const LatticePoint& root,
                                            int n, long L0) {
  require_dim(d, 2, kMaxDim);
  if (n < 0 || n > 12) throw DomainError("tree depth out of range");
  const ScaleLadder lad(L0);
  if (path.empty()) throw DomainError("empty path");
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (linf_dist(path[i - 1], path[i], d) > 1) throw DomainError("input is not a *-path");
  }
  if (!on_lattice(root, lad.level(n), d)) throw DomainError("root must lie in L_n Z^d");
  const long Ln = lad.level(n);
  if (!path_meets_sphere(path, root, Ln - 1, d) || !path_meets_sphere(path, root, 2 * Ln, d))
    throw DomainError("path does not cross the annulus S(x, L_n - 1) -> S(x, 2 L_n)");
  ProperEmbedding e;
  e.d = d;
  e.n = n;
  e.L0 = L0;
  e.map.assign(std::size_t(2) << n, LatticePoint{});
  e.map[1] = root;
  Extractor ex{path, d, n, lad, e};
  if (!ex.solve(1)) {
    std::ostringstream os;
    os << "no embedding found: d=" << d << " n=" << n << " L0=" << L0 << " path length " << path.size();
    throw ExtractionError(os.str());
  }
  if (!leaves_on_path(e, path) || !audit_embedding(e).ok) throw ExtractionError("extracted embedding failed verification");
  return e;
}

std::vector<LatticePoint> random_crossing_path(int d, const LatticePoint& root, int n, long L0, Rng& rng) {
  require_dim(d, 2, kMaxDim);
  const long Ln = ScaleLadder(L0).level(n);
  std::vector<LatticePoint> path;
  LatticePoint p = root;
  p[0] += Ln - 1;
  path.push_back(p);
  while (linf_dist(p, root, d) < 2 * Ln) {
    const auto k = rng.below(std::uint64_t(2 * d));
    p[int(k / 2)] += (k % 2) ? 1 : -1;
    path.push_back(p);
  }
  return path;
}

CapacityEstimate embedding_capacity_lb(const ProperEmbedding& e) {
  require_dim(e.d);
  if (e.L0 != 1) throw DomainError("leaf capacity bound is defined for L0 = 1");
  const int d = e.d;
  const double cd = green_constant(d);
  const double V = unit_ball_volume(d);
  const auto leaves = e.leaves();
  double sup = 0.0;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    // Potential of the own ball peaks at its center; every other ball acts as
    // a point mass seen from at least distance D - 1.
    double s = 1.0 / (d - 2);
    for (std::size_t j = 0; j < leaves.size(); ++j) {
      if (i == j) continue;
      double D2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double g = double(leaves[i][k] - leaves[j][k]);
        D2 += g * g;
      }
      const double D = std::sqrt(D2);
      if (D < 2.0) throw DomainError("leaf balls overlap");
      s += V * cd * std::pow(D - 1.0, 2.0 - d);
    }
    sup = std::max(sup, s);
  }
  CapacityEstimate c;
  c.value = double(leaves.size()) * V / sup;
  c.method = CapMethod::grid_lower;
  return c;
}

CapacityEstimate frame_capacity(long L, int d, const SimParams& sim, const RngSpec& rng, Exec exec) {
  require_dim(d);
  const double beta = model_constants(d).beta;
  if (!(double(L) > 3.0 * beta)) throw DomainError("frame capacity needs L > 3 beta");
  const FrameShape frame(d, L, beta);
  return estimate_capacity_mc(frame, sim, rng, exec);
}

namespace {

// Multisets 0 <= y_1 <= ... <= y_p <= B with their orbit sizes under signed
// permutations.
void passive_orbits(int p, long B, std::vector<std::pair<std::vector<long>, double>>& out) {
  std::vector<long> y(std::size_t(p), 0);
  std::function<void(int, long)> rec = [&](int i, long lo) {
    if (i == p) {
      double w = 1.0;
      for (long v : y) w *= v ? 2.0 : 1.0;
      double perm = std::tgamma(p + 1.0);
      for (std::size_t a = 0; a < y.size();) {
        std::size_t b = a;
        while (b < y.size() && y[b] == y[a]) ++b;
        perm /= std::tgamma(double(b - a) + 1.0);
        a = b;
      }
      out.emplace_back(y, w * std::round(perm));
      return;
    }
    for (long v = lo; v <= B; ++v) {
      y[std::size_t(i)] = v;
      rec(i + 1, v);
    }
  };
  rec(0, 0);
}

struct ConvKernel {
  int d;
  long B;
  std::vector<double> table;  // f by squared distance

  double f(long r2) const { return table[std::size_t(r2)]; }

  double chain(const LatticePoint& start, int steps, const LatticePoint& end) const {
    LatticePoint y{};
    for (int j = 0; j < d; ++j) y[j] = -B;
    double sum = 0.0;
    while (true) {
      long a2 = 0;
      for (int j = 0; j < d; ++j) a2 += (start[j] - y[j]) * (start[j] - y[j]);
      double tail;
      if (steps == 1) {
        long b2 = 0;
        for (int j = 0; j < d; ++j) b2 += (y[j] - end[j]) * (y[j] - end[j]);
        tail = f(b2);
      } else {
        tail = chain(y, steps - 1, end);
      }
      sum += f(a2) * tail;
      int j = d - 1;
      while (j >= 0 && y[j] == B) {
        y[j] = -B;
        --j;
      }
      if (j < 0) break;
      ++y[j];
    }
    return sum;
  }
};

}  // namespace

double lattice_convolution(int d, int n, const LatticePoint& x_in, long box_cut) {
  require_dim(d);
  if (n < 0) throw DomainError("chain length must be nonnegative");
  if (box_cut < 0) throw DomainError("box_cut must be nonnegative");
  // The box and the kernel are invariant under signed coordinate permutations.
  LatticePoint x{};
  for (int j = 0; j < d; ++j) x[j] = std::labs(x_in[j]);
  std::sort(x.begin(), x.begin() + d, std::greater<long>());
  const double expo = (2.0 - d) / 2.0;
  auto fval = [&](long r2) { return r2 == 0 ? 1.0 : std::min(1.0, std::pow(double(r2), expo)); };
  if (n == 0) {
    long r2 = 0;
    for (int j = 0; j < d; ++j) r2 += x[j] * x[j];
    return fval(r2);
  }
  const long B = box_cut;
  int active = 0;
  while (active < d && x[active] != 0) ++active;
  const int passive = d - active;
  const double width = double(2 * B + 1);

  long reach = 0;
  for (int j = 0; j < d; ++j) reach += (B + x[j]) * (B + x[j]);
  reach = std::max(reach, long(d) * (2 * B) * (2 * B));
  if (reach > 200'000'000L) throw DomainError("box_cut too large for the lookup table");
  ConvKernel K{d, B, {}};
  K.table.resize(std::size_t(reach) + 1);
  for (long r2 = 0; r2 <= reach; ++r2) K.table[std::size_t(r2)] = fval(r2);

  if (n == 1) {
    const double work = std::pow(width, active) * (double(passive) * double(B * B) + 1.0);
    if (work > 5e10) throw DomainError("box_cut too large for exact summation");
    // Passive coordinates (x_j = 0) enter only through their sum of squares.
    std::vector<double> H{1.0};
    for (int p = 0; p < passive; ++p) {
      std::vector<double> next(H.size() + std::size_t(B * B), 0.0);
      for (std::size_t s = 0; s < H.size(); ++s) {
        if (H[s] == 0.0) continue;
        for (long v = -B; v <= B; ++v) next[s + std::size_t(v * v)] += H[s];
      }
      H.swap(next);
    }
    LatticePoint y{};
    for (int j = 0; j < active; ++j) y[j] = -B;
    double sum = 0.0;
    while (true) {
      long a2 = 0, b2 = 0;
      for (int j = 0; j < active; ++j) {
        a2 += y[j] * y[j];
        b2 += (y[j] - x[j]) * (y[j] - x[j]);
      }
      for (std::size_t s = 0; s < H.size(); ++s) {
        if (H[s] != 0.0) sum += H[s] * K.f(a2 + long(s)) * K.f(b2 + long(s));
      }
      int j = active - 1;
      while (j >= 0 && y[j] == B) {
        y[j] = -B;
        --j;
      }
      if (j < 0) break;
      ++y[j];
    }
    return sum;
  }

  // n >= 2: the first vertex runs over orbits of the stabilizer of x.
  std::vector<std::pair<std::vector<long>, double>> orbits;
  passive_orbits(passive, B, orbits);
  const double reps = std::pow(width, active) * double(orbits.size());
  const double work = reps * std::pow(width, double(d) * (n - 1));
  if (work > 2e10) throw DomainError("box_cut too large for exact summation");
  double sum = 0.0;
  LatticePoint y{};
  for (int j = 0; j < active; ++j) y[j] = -B;
  while (true) {
    for (const auto& [py, w] : orbits) {
      for (int p = 0; p < passive; ++p) y[active + p] = py[std::size_t(p)];
      long a2 = 0;
      for (int j = 0; j < d; ++j) a2 += y[j] * y[j];
      sum += w * K.f(a2) * K.chain(y, n - 1, x);
    }
    int j = active - 1;
    while (j >= 0 && y[j] == B) {
      y[j] = -B;
      --j;
    }
    if (j < 0) break;
    ++y[j];
  }
  return sum;
}

void write_embedding(std::ostream& os, const ProperEmbedding& e) {
  os << "brint-embedding 1\n" << e.d << ' ' << e.n << ' ' << e.L0 << ' ' << to_string(e.target) << '\n';
  for (std::size_t m = 1; m < e.map.size(); ++m) {
    os << "node " << m;
    for (int j = 0; j < e.d; ++j) os << ' ' << e.map[m][j];
    os << '\n';
  }
}

ProperEmbedding read_embedding(std::istream& is) {
  auto bad = [](const std::string& why) { return ConfigurationError("embedding record: " + why); };
  std::string tag, target;
  int version = 0;
  if (!(is >> tag >> version) || tag != "brint-embedding" || version != 1) throw bad("bad header");
  ProperEmbedding e;
  if (!(is >> e.d >> e.n >> e.L0 >> target)) throw bad("bad parameters");
  require_dim(e.d, 2, kMaxDim);
  if (e.n < 0 || e.n > 20) throw bad("depth out of range");
  if (target == "slab") {
    e.target = EmbeddingTarget::slab;
  } else if (target == "full_lattice") {
    e.target = EmbeddingTarget::full_lattice;
  } else {
    throw bad("unknown target " + target);
  }
  e.map.assign(std::size_t(2) << e.n, LatticePoint{});
  for (std::size_t m = 1; m < e.map.size(); ++m) {
    std::size_t idx = 0;
    if (!(is >> tag >> idx) || tag != "node" || idx != m) throw bad("node " + std::to_string(m) + " missing");
    for (int j = 0; j < e.d; ++j) {
      if (!(is >> e.map[m][j])) throw bad("short coordinates");
    }
  }
  return e;
}

}  // namespace brint
