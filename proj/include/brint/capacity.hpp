#pragma once

// Newtonian potential theory for Brownian motion with generator Delta/2:
// Green function, capacities (closed form, walk-on-spheres Monte Carlo,
// voxel variational bounds), hitting probabilities and pair Green energies.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "brint/brownian.hpp"
#include "brint/core.hpp"
#include "brint/parallel.hpp"
#include "brint/rng.hpp"
#include "brint/shape.hpp"

namespace brint {

/// Simulation knobs shared by capacity, sampling and percolation code. Zero
/// values are resolved against the geometry by resolved().
struct SimParams {
  double step_h = 0.01;
  double rho_big = 0.0;   // launch sphere radius, default 1.25 x circumradius
  double rho_kill = 0.0;  // return-test radius, default 4 x rho_big
  double rho_esc = 0.0;   // escape radius for forward paths
  std::size_t max_steps = 2'000'000;
  double eps_hit = 0.0;   // default 1e-3 x circumradius
  std::size_t n_walkers = 100'000;

  SimParams resolved(double circumradius) const;
};

enum class CapMethod { mc_hitting, closed_form, grid_lower, grid_upper };
std::string to_string(CapMethod m);

struct CapacityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_walkers = 0;
  CapMethod method = CapMethod::closed_form;
  double bias_bound = 0.0;  // relative, for mc_hitting
  double rho_big = 0.0;
};

/// g(x, y) = c_d |x - y|^{2-d}.
double green(const Point& x, const Point& y);
/// |x|^{2-d} for a squared norm, with integer-power fast paths.
double inv_pow_dm2(double r2, int d);

CapacityEstimate cap_ball_closed_form(int d, double R);
/// P_z[H_{B(0,R)} < infinity] = (R/|z|)^{d-2}.
double hitting_prob_ball(const Point& z, double R);

struct WosConfig {
  Point center;
  double rho_big = 0.0;
  double rho_kill = 0.0;
  double eps = 0.0;
  std::size_t max_steps = 0;
};

/// Runs a walk-on-spheres walker from x until it comes within cfg.eps of K
/// (returns true, *hit set) or escapes for good. Far excursions are resolved
/// exactly: beyond rho_kill the walker returns to the launch sphere with
/// probability (rho_big/|x|)^{d-2}, landing at an exterior-harmonic-measure
/// point. Requires K inside B(center, rho_big).
bool wos_walk(const Shape& K, Point x, const WosConfig& cfg, Rng& rng, Point* hit = nullptr);

/// Point of the sphere S(c, rho) drawn from the harmonic measure seen from x
/// (|x - c| > rho) conditioned on hitting the sphere.
Point sample_return_point(const Point& x, const Point& c, double rho, Rng& rng);

WosConfig wos_config(const Shape& K, const SimParams& sim);

/// Launches from the uniform distribution on S(cfg.center, cfg.rho_big) until a
/// walker hits K; the hit point follows the normalized equilibrium measure.
Point sample_equilibrium_with(const Shape& K, const WosConfig& cfg, Rng& rng);

/// One point from the normalized equilibrium measure of B(K, eps_hit) (approx. of K).
Point sample_equilibrium(const Shape& K, const SimParams& sim, const RngSpec& rng);
/// n independent equilibrium points; point i uses the substream rng.child(i).
std::vector<Point> sample_equilibrium_many(const Shape& K, const SimParams& sim, std::size_t n,
                                           const RngSpec& rng, Exec exec = Exec::parallel);

CapacityEstimate estimate_capacity_mc(const Shape& K, const SimParams& sim, const RngSpec& rng,
                                      Exec exec = Exec::parallel);

/// Monte Carlo frequency of hitting K from a fixed start.
std::pair<double, double> hitting_frequency_mc(const Shape& K, const Point& z, const SimParams& sim,
                                               std::size_t n, const RngSpec& rng);

/// Finite union of closed cubes of side `spacing`, cell i centered at origin + spacing * index.
struct VoxelSet {
  int d = 3;
  double spacing = 1.0;
  Point origin;
  std::vector<int> cells;  // flattened integer indices, d per cell

  std::size_t size() const { return cells.size() / std::size_t(d); }
  Point cell_center(std::size_t i) const;
  double volume() const { return double(size()) * std::pow(spacing, d); }
  std::vector<Primitive> cubes() const;
};

/// Cells whose centers lie within distance 0 of K (evaluated through K.distance).
VoxelSet voxelize(const Shape& K, double spacing);
VoxelSet voxelize_union(const PrimitiveUnion& K, double spacing);

/// Voxel potentials V_i = sum_j vol g(c_i, c_j) with the analytic self term of
/// an equal-volume ball; lower = Vol / max V, upper = Vol / min V.
std::pair<CapacityEstimate, CapacityEstimate> variational_capacity_bounds(const VoxelSet& K,
                                                                         Exec exec = Exec::parallel);
std::vector<double> voxel_potentials(const VoxelSet& K, Exec exec = Exec::parallel);

/// Mutual Green energy of two unit balls at center distance D,
/// int_{B(a,1)} int_{B(b,1)} g(x, y) dx dy.
double ball_pair_energy(int d, double D);

/// F_L(i, j): Green energy of the unit sausages of two paths over the time
/// window [L/2, L], computed by sampling (s, t) and integrating the ball pair
/// exactly.
double pair_green_energy(const Trajectory& ti, const Trajectory& tj, double L, const RngSpec& rng,
                         std::size_t n_samples = 4096);

struct RateEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// 2 alpha P_{e_{B(x, 2 rho)}}[H_{B(y, 2 rho)} < infinity] with rho = sqrt(d)/2 + 1.
RateEstimate pair_visit_rate(const Point& x, const Point& y, double alpha, const SimParams& sim,
                             const RngSpec& rng);

}  // namespace brint
