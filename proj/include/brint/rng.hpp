#pragma once

// Counter-style splittable randomness. A stream is a pure function of its
// RngSpec, so replicas can be generated in any order on any thread.

#include <cstdint>

#include "brint/core.hpp"

namespace brint {

struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replica_index = 0;
  std::uint64_t stream = 0;  // substream path hash, 0 for the replica root

  /// Independent child stream identified by `tag`.
  RngSpec child(std::uint64_t tag) const;
  RngSpec replica(std::uint64_t index) const { return {master_seed, index, 0}; }
  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

/// xoshiro256++ seeded from an RngSpec.
class Rng {
 public:
  explicit Rng(const RngSpec& spec);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }
  double normal();
  double exponential();
  std::uint64_t below(std::uint64_t n);
  std::uint64_t poisson(double mean);

  /// Uniform point on the unit sphere S^{d-1}.
  Point unit_vector(int d);
  /// Uniform point in the unit ball of R^d.
  Point in_unit_ball(int d);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace brint
