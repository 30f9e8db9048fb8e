#pragma once

// Compact sets described by their Euclidean distance function, as needed by
// walk-on-spheres. distance() may return a lower bound, never an overestimate.

#include <memory>
#include <vector>

#include "brint/core.hpp"

namespace brint {

class Shape {
 public:
  virtual ~Shape() = default;
  virtual int dim() const = 0;
  /// Euclidean distance from p to the set, 0 inside.
  virtual double distance(const Point& p) const = 0;
  virtual Point center() const = 0;
  /// The set lies in B(center(), circumradius()).
  virtual double circumradius() const = 0;
};

using ShapePtr = std::shared_ptr<const Shape>;

class BallShape final : public Shape {
 public:
  BallShape(Point c, double R);
  int dim() const override { return c_.dim(); }
  double distance(const Point& p) const override;
  Point center() const override { return c_; }
  double circumradius() const override { return R_; }
  double radius() const { return R_; }

 private:
  Point c_;
  double R_;
};

/// Closed l-infinity ball (axis-aligned cube).
class BoxShape final : public Shape {
 public:
  BoxShape(Point c, double half_width);
  int dim() const override { return c_.dim(); }
  double distance(const Point& p) const override;
  Point center() const override { return c_; }
  double circumradius() const override { return hw_ * std::sqrt(double(c_.dim())); }

 private:
  Point c_;
  double hw_;
};

/// Euclidean r-neighbourhood B(K, r) of another shape.
class InflatedShape final : public Shape {
 public:
  InflatedShape(ShapePtr base, double r);
  int dim() const override { return base_->dim(); }
  double distance(const Point& p) const override;
  Point center() const override { return base_->center(); }
  double circumradius() const override { return base_->circumradius() + r_; }

 private:
  ShapePtr base_;
  double r_;
};

ShapePtr make_region_shape(const BoxRegion& region);
/// B(region, r) for a Euclidean or l-infinity box region.
ShapePtr make_inflated_region(const BoxRegion& region, double r);

/// One element of a union: a capsule (segment a-b thickened by `radius`, a
/// ball when a == b) or an axis-aligned cube of half width `radius` at a.
struct Primitive {
  enum class Kind : unsigned char { capsule, cube };
  Point a, b;
  double radius = 0.0;
  Kind kind = Kind::capsule;

  static Primitive capsule(const Point& a, const Point& b, double r) { return {a, b, r, Kind::capsule}; }
  static Primitive ball(const Point& c, double r) { return {c, c, r, Kind::capsule}; }
  static Primitive cube(const Point& c, double hw) { return {c, c, hw, Kind::cube}; }
  double distance(const Point& p) const;
};

double point_segment_distance2(const Point& p, const Point& a, const Point& b);

/// Union of primitives with a median-split bounding volume hierarchy.
class PrimitiveUnion final : public Shape {
 public:
  explicit PrimitiveUnion(std::vector<Primitive> prims);
  int dim() const override { return d_; }
  double distance(const Point& p) const override;
  Point center() const override { return center_; }
  double circumradius() const override { return circ_; }
  std::size_t size() const { return prims_.size(); }
  const std::vector<Primitive>& primitives() const { return prims_; }
  /// Reference implementation: minimum over all primitives.
  double distance_brute(const Point& p) const;

 private:
  struct Node {
    std::array<double, kMaxDim> lo, hi;
    int left = -1, right = -1;
    unsigned first = 0, count = 0;
  };
  int build(unsigned first, unsigned count);
  double box_distance2(const Node& n, const Point& p) const;

  int d_ = 0;
  std::vector<Primitive> prims_;
  std::vector<Node> nodes_;
  Point center_;
  double circ_ = 0.0;
};

/// B(S2(0, L), beta): the beta-inflation of the lattice square
/// {y in Z^2 x {0}^{d-2} : |y|_inf = L}.
class FrameShape final : public Shape {
 public:
  FrameShape(int d, long L, double beta);
  int dim() const override { return d_; }
  double distance(const Point& p) const override;
  Point center() const override { return Point(d_); }
  double circumradius() const override { return double(L_) * std::sqrt(2.0) + beta_; }

 private:
  int d_;
  long L_;
  double beta_;
};

}  // namespace brint
