#pragma once

// Dimension-generic geometry and model constants shared by every module.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace brint {

inline constexpr int kMinDim = 3;
inline constexpr int kMaxDim = 8;

/// Raised when an argument lies outside an operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when simulation parameters cannot produce a usable estimate.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_dim(int d, int lo = kMinDim, int hi = kMaxDim);

/// A point of R^d, 1 <= d <= kMaxDim, stored inline.
class Point {
 public:
  Point() = default;
  explicit Point(int dim);
  Point(std::initializer_list<double> coords);
  static Point from_span(std::span<const double> coords);

  int dim() const { return dim_; }
  double& operator[](int i) { return x_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return x_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const { return {x_.data(), static_cast<std::size_t>(dim_)}; }
  std::span<double> coords() { return {x_.data(), static_cast<std::size_t>(dim_)}; }

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double s);

  double norm2() const;
  double norm() const { return std::sqrt(norm2()); }
  double norm_inf() const;

  friend bool operator==(const Point& a, const Point& b);

 private:
  std::array<double, kMaxDim> x_{};
  int dim_ = 0;
};

Point operator+(Point a, const Point& b);
Point operator-(Point a, const Point& b);
Point operator*(Point a, double s);
Point operator*(double s, Point a);
double dot(const Point& a, const Point& b);
double dist2(const Point& a, const Point& b);
double dist(const Point& a, const Point& b);
double dist_inf(const Point& a, const Point& b);

enum class NormTag { euclidean, linf };

/// Closed ball B(center, half_width) in the selected norm.
struct BoxRegion {
  Point center;
  double half_width = 1.0;
  NormTag norm = NormTag::linf;

  BoxRegion() = default;
  BoxRegion(Point c, double hw, NormTag n = NormTag::linf);

  int dim() const { return center.dim(); }
  double circumradius() const;
  bool contains(const Point& p) const;
  /// Euclidean distance from p to the region (0 inside).
  double distance(const Point& p) const;
  /// True when `inner` lies inside this region.
  bool contains_region(const BoxRegion& inner) const;
};

struct ModelParams {
  int d = 3;
  double alpha = 0.0;
  double r = 1.0;

  ModelParams() = default;
  ModelParams(int dim, double level, double radius);
};

/// ceil((d-2)/2): the almost-sure diameter of the sausage graph.
int s_d(int d);

struct ModelConstants {
  double beta;  // 2 sqrt(d) + 4, frame inflation radius
  double rho;   // sqrt(d)/2 + 1, ball radius for pair-visit bounds
};
ModelConstants model_constants(int d);

/// Nearest lattice point, ties rounded toward the smaller coordinate.
Point lattice_round(const Point& p);

// Potential theory constants for Brownian motion with generator Delta/2.

/// Green function prefactor c_d = Gamma(d/2-1) / (2 pi^{d/2}).
double green_constant(int d);
/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);
/// Surface area of the unit sphere S^{d-1}.
double unit_sphere_area(int d);

}  // namespace brint
