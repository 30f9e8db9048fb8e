#include "brint/shape.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace brint {

BallShape::BallShape(Point c, double R) : c_(c), R_(R) {
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");
}

double BallShape::distance(const Point& p) const { return std::max(0.0, dist(p, c_) - R_); }

BoxShape::BoxShape(Point c, double half_width) : c_(c), hw_(half_width) {
  if (!(half_width > 0.0)) throw DomainError("box half width must be positive");
}

double BoxShape::distance(const Point& p) const {
  double s = 0.0;
  for (int i = 0; i < c_.dim(); ++i) {
    const double g = std::abs(p[i] - c_[i]) - hw_;
    if (g > 0.0) s += g * g;
  }
  return std::sqrt(s);
}

InflatedShape::InflatedShape(ShapePtr base, double r) : base_(std::move(base)), r_(r) {
  if (!base_) throw DomainError("inflated shape needs a base");
  if (!(r >= 0.0)) throw DomainError("inflation radius must be nonnegative");
}

double InflatedShape::distance(const Point& p) const { return std::max(0.0, base_->distance(p) - r_); }

ShapePtr make_region_shape(const BoxRegion& region) {
  if (region.norm == NormTag::euclidean) return std::make_shared<BallShape>(region.center, region.half_width);
  return std::make_shared<BoxShape>(region.center, region.half_width);
}

ShapePtr make_inflated_region(const BoxRegion& region, double r) {
  if (region.norm == NormTag::euclidean) return std::make_shared<BallShape>(region.center, region.half_width + r);
  return std::make_shared<InflatedShape>(make_region_shape(region), r);
}

double point_segment_distance2(const Point& p, const Point& a, const Point& b) {
  const int d = p.dim();
  double ab2 = 0.0, t = 0.0;
  for (int i = 0; i < d; ++i) {
    const double u = b[i] - a[i];
    ab2 += u * u;
    t += (p[i] - a[i]) * u;
  }
  t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double w = p[i] - (a[i] + t * (b[i] - a[i]));
    s += w * w;
  }
  return s;
}

double Primitive::distance(const Point& p) const {
  if (kind == Kind::cube) {
    double s = 0.0;
    for (int i = 0; i < p.dim(); ++i) {
      const double g = std::abs(p[i] - a[i]) - radius;
      if (g > 0.0) s += g * g;
    }
    return std::sqrt(s);
  }
  return std::max(0.0, std::sqrt(point_segment_distance2(p, a, b)) - radius);
}

PrimitiveUnion::PrimitiveUnion(std::vector<Primitive> prims) : prims_(std::move(prims)) {
  if (prims_.empty()) throw DomainError("union of zero primitives");
  d_ = prims_.front().a.dim();
  nodes_.reserve(2 * prims_.size() / 4 + 2);
  build(0, static_cast<unsigned>(prims_.size()));
  const Node& root = nodes_[0];
  center_ = Point(d_);
  for (int i = 0; i < d_; ++i) center_[i] = 0.5 * (root.lo[i] + root.hi[i]);
  double c2 = 0.0;
  for (const auto& q : prims_) {
    // Farthest point of a capsule or cube from center_, bounded via its corners.
    const double extra = q.kind == Primitive::Kind::cube ? q.radius * std::sqrt(double(d_)) : q.radius;
    c2 = std::max(c2, dist(q.a, center_) + extra);
    c2 = std::max(c2, dist(q.b, center_) + extra);
  }
  circ_ = c2;
}

int PrimitiveUnion::build(unsigned first, unsigned count) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Node n;
  n.lo.fill(std::numeric_limits<double>::infinity());
  n.hi.fill(-std::numeric_limits<double>::infinity());
  for (unsigned k = first; k < first + count; ++k) {
    const auto& q = prims_[k];
    for (int i = 0; i < d_; ++i) {
      n.lo[i] = std::min({n.lo[i], q.a[i] - q.radius, q.b[i] - q.radius});
      n.hi[i] = std::max({n.hi[i], q.a[i] + q.radius, q.b[i] + q.radius});
    }
  }
  n.first = first;
  n.count = count;
  if (count > 4) {
    int axis = 0;
    for (int i = 1; i < d_; ++i) {
      if (n.hi[i] - n.lo[i] > n.hi[axis] - n.lo[axis]) axis = i;
    }
    const unsigned mid = first + count / 2;
    auto key = [axis](const Primitive& q) { return q.a[axis] + q.b[axis]; };
    std::nth_element(prims_.begin() + first, prims_.begin() + mid, prims_.begin() + first + count,
                     [&](const Primitive& x, const Primitive& y) { return key(x) < key(y); });
    n.left = build(first, mid - first);
    n.right = build(mid, first + count - mid);
  }
  nodes_[static_cast<std::size_t>(idx)] = n;
  return idx;
}

double PrimitiveUnion::box_distance2(const Node& n, const Point& p) const {
  double s = 0.0;
  for (int i = 0; i < d_; ++i) {
    double g = 0.0;
    if (p[i] < n.lo[i]) g = n.lo[i] - p[i];
    else if (p[i] > n.hi[i]) g = p[i] - n.hi[i];
    s += g * g;
  }
  return s;
}

double PrimitiveUnion::distance(const Point& p) const {
  double best = std::numeric_limits<double>::infinity();
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top) {
    const Node& n = nodes_[static_cast<std::size_t>(stack[--top])];
    const double bd = box_distance2(n, p);
    if (bd >= best * best) continue;
    if (n.left < 0) {
      for (unsigned k = n.first; k < n.first + n.count; ++k) {
        best = std::min(best, prims_[k].distance(p));
        if (best == 0.0) return 0.0;
      }
      continue;
    }
    const double dl = box_distance2(nodes_[static_cast<std::size_t>(n.left)], p);
    const double dr = box_distance2(nodes_[static_cast<std::size_t>(n.right)], p);
    // Push the farther child first so the nearer one is explored next.
    if (dl < dr) {
      stack[top++] = n.right;
      stack[top++] = n.left;
    } else {
      stack[top++] = n.left;
      stack[top++] = n.right;
    }
  }
  return best;
}

double PrimitiveUnion::distance_brute(const Point& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : prims_) best = std::min(best, q.distance(p));
  return best;
}

FrameShape::FrameShape(int d, long L, double beta) : d_(d), L_(L), beta_(beta) {
  require_dim(d, 2, kMaxDim);
  if (L < 1) throw DomainError("frame size must be positive");
  if (!(beta > 0.0)) throw DomainError("frame inflation must be positive");
}

double FrameShape::distance(const Point& p) const {
  double rest = 0.0;
  for (int i = 2; i < d_; ++i) rest += p[i] * p[i];
  const double Lf = double(L_);
  // Nearest lattice point on a side: the fixed coordinate is +-L, the free one
  // is rounded and clamped to [-L, L].
  auto side = [&](double fixed_gap, double free) {
    const double q = std::clamp(std::round(free), -Lf, Lf);
    return fixed_gap * fixed_gap + (free - q) * (free - q);
  };
  double best = std::numeric_limits<double>::infinity();
  for (double s : {-Lf, Lf}) {
    best = std::min(best, side(p[0] - s, p[1]));
    best = std::min(best, side(p[1] - s, p[0]));
  }
  return std::max(0.0, std::sqrt(best + rest) - beta_);
}

}  // namespace brint
