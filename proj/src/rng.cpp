#include "brint/rng.hpp"

#include <cmath>

namespace brint {

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ rotl(b, 17) ^ 0x6A09E667F3BCC909ULL;
  splitmix64(s);
  s ^= b;
  return splitmix64(s);
}

RngSpec RngSpec::child(std::uint64_t tag) const {
  return {master_seed, replica_index, mix64(stream + 0x1234567ULL, tag)};
}

Rng::Rng(const RngSpec& spec) {
  std::uint64_t st = mix64(mix64(spec.master_seed, spec.replica_index), spec.stream);
  for (auto& w : s_) w = splitmix64(st);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::exponential() { return -std::log(uniform_pos()); }

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire's nearly divisionless method.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw DomainError("poisson mean must be nonnegative");
  // Counting unit-rate arrivals on [0, mean]; cost is linear in the mean,
  // which stays in the low thousands for every window this library samples.
  std::uint64_t k = 0;
  double t = exponential();
  while (t <= mean) {
    ++k;
    t += exponential();
  }
  return k;
}

Point Rng::unit_vector(int d) {
  Point p(d);
  double n2 = 0.0;
  do {
    for (int i = 0; i < d; ++i) p[i] = normal();
    n2 = p.norm2();
  } while (n2 == 0.0);
  p *= 1.0 / std::sqrt(n2);
  return p;
}

Point Rng::in_unit_ball(int d) {
  Point p = unit_vector(d);
  p *= std::pow(uniform_pos(), 1.0 / d);
  return p;
}

}  // namespace brint
