#pragma once

// Dyadic renormalization trees: scales L_n = L0 6^n, proper embeddings of the
// depth-n binary tree, their exact counts, extraction from lattice crossings
// and the capacity bounds attached to them.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "brint/capacity.hpp"
#include "brint/core.hpp"
#include "brint/rng.hpp"

namespace brint {

using BigInt = boost::multiprecision::cpp_int;
using LatticePoint = std::array<long, kMaxDim>;

long linf_norm(const LatticePoint& z, int d);
long linf_dist(const LatticePoint& a, const LatticePoint& b, int d);

class ScaleLadder {
 public:
  explicit ScaleLadder(long L0);
  long L0() const { return L0_; }
  /// L_n = L0 6^n; throws on overflow.
  long level(int n) const;

 private:
  long L0_;
};

/// All z in Z^d with |z|_inf = radius.
std::vector<LatticePoint> enumerate_child_offsets(int d, long radius);

/// Per-node constant |S_inf(6)| |S_inf(12)| in Z^d.
BigInt per_node_constant(int d);
/// Number of proper embeddings of T_n with a fixed root: C^{2^n - 1}.
BigInt count_embeddings(int d, int n);
/// Depth-1 count by direct enumeration of all pairs of points of L_0 Z^d in
/// the box of radius 2 L_1 around the root, at raw scale.
BigInt count_embeddings_brute_depth1(int d, long L0 = 1);

enum class EmbeddingTarget { full_lattice, slab };
std::string to_string(EmbeddingTarget t);

/// Nodes in heap order: node 1 is the root, the children of node m are 2m
/// (at distance L_{n-k}) and 2m+1 (at distance 2 L_{n-k}).
struct ProperEmbedding {
  int d = 2;
  int n = 0;
  long L0 = 1;
  EmbeddingTarget target = EmbeddingTarget::full_lattice;
  std::vector<LatticePoint> map;  // size 2^{n+1}, entry 0 unused

  const LatticePoint& root() const { return map.at(1); }
  const LatticePoint& at(std::size_t node) const { return map.at(node); }
  std::size_t first_leaf() const { return std::size_t(1) << n; }
  std::size_t leaf_count() const { return std::size_t(1) << n; }
  std::vector<LatticePoint> leaves() const;
};

int node_depth(std::size_t node);
/// Lexical distance of two leaves of the same depth.
int lexical_distance(std::size_t m, std::size_t mp);
/// Leaves of T_(n) at lexical distance k from leaf m.
std::vector<std::size_t> leaves_at_distance(int n, std::size_t m, int k);

ProperEmbedding sample_embedding(int d, int n, long L0, const LatticePoint& root, EmbeddingTarget target, Rng& rng);

struct AuditResult {
  bool ok = true;
  std::string failure;
};
/// Lattice membership, root, and parent-child distance invariants.
AuditResult audit_embedding(const ProperEmbedding& e);

/// Exact check of |y - z| >= L_{k-1} for all leaf pairs at lexical distance k
/// and all y, z on the spheres S(T(m), L0-1), S(T(m'), L0-1).
bool verify_spreadout(const ProperEmbedding& e);
/// Smallest squared Euclidean distance between points of S(a, rho) and S(b, rho).
long sphere_min_dist2(const LatticePoint& a, const LatticePoint& b, long rho, int d);

/// True when some path vertex lies on S(c, R).
bool path_meets_sphere(const std::vector<LatticePoint>& path, const LatticePoint& c, long R, int d);

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Proper embedding of T_n rooted at `root` all of whose leaves sit on the
/// *-path, found by depth-first search over child offsets.
ProperEmbedding extract_embedding_from_path(const std::vector<LatticePoint>& path, int d, const LatticePoint& root,
                                            int n, long L0);
/// Nearest-neighbour walk from root + (L_n - 1) e_1 until it reaches S(root, 2 L_n).
std::vector<LatticePoint> random_crossing_path(int d, const LatticePoint& root, int n, long L0, Rng& rng);
/// The leaf condition: the path meets S(T(m), L0-1) for every leaf m.
bool leaves_on_path(const ProperEmbedding& e, const std::vector<LatticePoint>& path);

/// Variational lower bound Volume(X) / sup_x int_X g(x, y) dy for the union of
/// unit balls around the leaves (L0 = 1, d >= 3).
CapacityEstimate embedding_capacity_lb(const ProperEmbedding& e);

/// Capacity of the beta-inflation of the square frame S^(2)(0, L).
CapacityEstimate frame_capacity(long L, int d, const SimParams& sim, const RngSpec& rng, Exec exec = Exec::parallel);

/// Truncated chain sum over x_1..x_n in [-box_cut, box_cut]^d of
/// prod_{i=0}^{n} min(1, |x_i - x_{i+1}|^{2-d}), x_0 = 0, x_{n+1} = x.
double lattice_convolution(int d, int n, const LatticePoint& x, long box_cut);

void write_embedding(std::ostream& os, const ProperEmbedding& e);
ProperEmbedding read_embedding(std::istream& is);

}  // namespace brint
