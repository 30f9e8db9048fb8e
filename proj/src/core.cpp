#include "brint/core.hpp"

#include <algorithm>
#include <numbers>

namespace brint {

void require_dim(int d, int lo, int hi) {
  if (d < lo || d > hi) {
    throw DomainError("dimension " + std::to_string(d) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
}

Point::Point(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("point dimension out of range");
}

Point::Point(std::initializer_list<double> coords) : dim_(static_cast<int>(coords.size())) {
  if (dim_ < 1 || dim_ > kMaxDim) throw DomainError("point dimension out of range");
  std::copy(coords.begin(), coords.end(), x_.begin());
}

Point Point::from_span(std::span<const double> coords) {
  Point p(static_cast<int>(coords.size()));
  std::copy(coords.begin(), coords.end(), p.x_.begin());
  return p;
}

Point& Point::operator+=(const Point& o) {
  for (int i = 0; i < dim_; ++i) x_[i] += o.x_[i];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  for (int i = 0; i < dim_; ++i) x_[i] -= o.x_[i];
  return *this;
}

Point& Point::operator*=(double s) {
  for (int i = 0; i < dim_; ++i) x_[i] *= s;
  return *this;
}

double Point::norm2() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += x_[i] * x_[i];
  return s;
}

double Point::norm_inf() const {
  double m = 0.0;
  for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(x_[i]));
  return m;
}

bool operator==(const Point& a, const Point& b) {
  if (a.dim_ != b.dim_) return false;
  for (int i = 0; i < a.dim_; ++i) {
    if (a.x_[i] != b.x_[i]) return false;
  }
  return true;
}

Point operator+(Point a, const Point& b) { return a += b; }
Point operator-(Point a, const Point& b) { return a -= b; }
Point operator*(Point a, double s) { return a *= s; }
Point operator*(double s, Point a) { return a *= s; }

double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double dist2(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

double dist_inf(const Point& a, const Point& b) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

BoxRegion::BoxRegion(Point c, double hw, NormTag n) : center(c), half_width(hw), norm(n) {
  if (!(hw > 0.0)) throw DomainError("BoxRegion half_width must be positive");
}

double BoxRegion::circumradius() const {
  return norm == NormTag::euclidean ? half_width : half_width * std::sqrt(double(dim()));
}

bool BoxRegion::contains(const Point& p) const {
  if (norm == NormTag::euclidean) return dist2(p, center) <= half_width * half_width;
  return dist_inf(p, center) <= half_width;
}

double BoxRegion::distance(const Point& p) const {
  if (norm == NormTag::euclidean) return std::max(0.0, dist(p, center) - half_width);
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) {
    const double g = std::abs(p[i] - center[i]) - half_width;
    if (g > 0.0) s += g * g;
  }
  return std::sqrt(s);
}

bool BoxRegion::contains_region(const BoxRegion& inner) const {
  if (inner.dim() != dim()) return false;
  const double off = norm == NormTag::linf ? dist_inf(inner.center, center) : dist(inner.center, center);
  if (norm == NormTag::linf) {
    // A Euclidean ball of radius w fits into an l-inf box exactly when its bounding cube does.
    return off + inner.half_width <= half_width;
  }
  return off + inner.circumradius() <= half_width;
}

ModelParams::ModelParams(int dim, double level, double radius) : d(dim), alpha(level), r(radius) {
  require_dim(d);
  if (!(alpha >= 0.0)) throw DomainError("alpha must be nonnegative");
  if (!(r > 0.0)) throw DomainError("sausage radius must be positive");
}

int s_d(int d) {
  if (d < 3) throw DomainError("s_d requires d >= 3");
  return (d - 2 + 1) / 2;
}

ModelConstants model_constants(int d) {
  if (d < 3) throw DomainError("model constants require d >= 3");
  const double sq = std::sqrt(double(d));
  return {2.0 * sq + 4.0, sq / 2.0 + 1.0};
}

Point lattice_round(const Point& p) {
  Point q(p.dim());
  for (int i = 0; i < p.dim(); ++i) q[i] = std::ceil(p[i] - 0.5);
  return q;
}

double green_constant(int d) {
  return std::tgamma(d / 2.0 - 1.0) / (2.0 * std::pow(std::numbers::pi, d / 2.0));
}

double unit_ball_volume(int d) { return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0); }

double unit_sphere_area(int d) { return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0); }

}  // namespace brint
