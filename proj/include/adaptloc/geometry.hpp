#pragma once
// Exact integer predicates on lattice points.
//
// Coordinates are bounded by 2^25 in magnitude, so every orientation
// determinant of coordinate differences fits in a signed 64-bit integer.
// Ties are removed by a single symbolic rule: the plane is sheared so that
// x-order is lexicographic (x, then y), and a query point p is located as
// p + (eps, eps^2) for an infinitesimal eps sitting below the shear.

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "adaptloc/errors.hpp"

namespace adaptloc {

inline constexpr std::int64_t kCoordBound = std::int64_t{1} << 25;

class Point {
 public:
  constexpr Point() = default;
  constexpr Point(std::int64_t x, std::int64_t y) : x_(check(x)), y_(check(y)) {}

  constexpr std::int64_t x() const { return x_; }
  constexpr std::int64_t y() const { return y_; }

  friend constexpr bool operator==(const Point&, const Point&) = default;

  std::string str() const {
    return "(" + std::to_string(x_) + "," + std::to_string(y_) + ")";
  }

 private:
  static constexpr std::int32_t check(std::int64_t v) {
    if (v > kCoordBound || v < -kCoordBound) {
      throw CoordinateOutOfBounds("coordinate " + std::to_string(v) +
                                  " exceeds bound 2^25");
    }
    return static_cast<std::int32_t>(v);
  }

  std::int32_t x_ = 0;
  std::int32_t y_ = 0;
};

enum class Orientation { CounterClockwise, Clockwise, Collinear };
enum class Side { Above, Below };

struct Segment {
  Point a;
  Point b;
};

// Sign of (b - a) x (c - a).
constexpr Orientation orientation(const Point& a, const Point& b, const Point& c) {
  const std::int64_t det = (b.x() - a.x()) * (c.y() - a.y()) -
                           (b.y() - a.y()) * (c.x() - a.x());
  if (det > 0) return Orientation::CounterClockwise;
  if (det < 0) return Orientation::Clockwise;
  return Orientation::Collinear;
}

constexpr Orientation reverse(Orientation o) {
  switch (o) {
    case Orientation::CounterClockwise: return Orientation::Clockwise;
    case Orientation::Clockwise: return Orientation::CounterClockwise;
    default: return Orientation::Collinear;
  }
}

// The x-comparison of the sheared plane.
constexpr bool lex_less(const Point& p, const Point& q) {
  return p.x() != q.x() ? p.x() < q.x() : p.y() < q.y();
}

struct LexLess {
  constexpr bool operator()(const Point& p, const Point& q) const { return lex_less(p, q); }
};

// Orientation of p + (eps, eps^2) with respect to the directed line a -> b.
// Never Collinear for a != b; total even when p is a or b.
constexpr Orientation perturbed_orientation(const Point& a, const Point& b, const Point& p) {
  const Orientation o = orientation(a, b, p);
  if (o != Orientation::Collinear) return o;
  // (b - a) x (eps, eps^2) = dx * eps^2 - dy * eps; the eps term dominates.
  const std::int64_t dx = b.x() - a.x();
  const std::int64_t dy = b.y() - a.y();
  if (dy != 0) return dy > 0 ? Orientation::Clockwise : Orientation::CounterClockwise;
  return dx > 0 ? Orientation::CounterClockwise : Orientation::Clockwise;
}

// Side of the perturbed p relative to s directed from its lex-smaller to its
// lex-larger endpoint. Endpoint queries are rejected.
inline Side side_of_segment_perturbed(const Point& p, const Segment& s) {
  if (s.a == s.b) throw Error("degenerate segment " + s.a.str());
  if (p == s.a || p == s.b) {
    throw EndpointQuery("query " + p.str() + " is an endpoint of the segment");
  }
  const bool forward = lex_less(s.a, s.b);
  const Point& l = forward ? s.a : s.b;
  const Point& r = forward ? s.b : s.a;
  return perturbed_orientation(l, r, p) == Orientation::CounterClockwise ? Side::Above
                                                                         : Side::Below;
}

using Triangle = std::array<Point, 3>;

// True iff p + (eps, eps^2) is strictly inside the CCW triangle t.
constexpr bool point_in_triangle_perturbed(const Point& p, const Triangle& t) {
  for (int e = 0; e < 3; ++e) {
    if (perturbed_orientation(t[e], t[(e + 1) % 3], p) != Orientation::CounterClockwise) {
      return false;
    }
  }
  return true;
}

// Strict interior test without perturbation.
constexpr bool strictly_inside(const Point& p, const Triangle& t) {
  for (int e = 0; e < 3; ++e) {
    if (orientation(t[e], t[(e + 1) % 3], p) != Orientation::CounterClockwise) return false;
  }
  return true;
}

constexpr std::int64_t dot(const Point& o, const Point& u, const Point& v) {
  return (u.x() - o.x()) * (v.x() - o.x()) + (u.y() - o.y()) * (v.y() - o.y());
}

// p lies on the closed segment [a, b] (a != b).
constexpr bool on_segment(const Point& a, const Point& b, const Point& p) {
  if (orientation(a, b, p) != Orientation::Collinear) return false;
  return dot(a, b, p) >= 0 && dot(b, a, p) >= 0;
}

// True when [a,b] and [c,d] meet anywhere other than in one shared endpoint.
constexpr bool segments_interact_improperly(const Point& a, const Point& b, const Point& c,
                                            const Point& d) {
  const bool ac = a == c, ad = a == d, bc = b == c, bd = b == d;
  if ((ac && bd) || (ad && bc)) return true;
  if (ac || ad || bc || bd) {
    const Point& shared = (ac || ad) ? a : b;
    const Point& u = (shared == a) ? b : a;
    const Point& v = (shared == c) ? d : c;
    return orientation(shared, u, v) == Orientation::Collinear && dot(shared, u, v) > 0;
  }
  const Orientation o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const Orientation o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != Orientation::Collinear && o2 != Orientation::Collinear &&
      o3 != Orientation::Collinear && o4 != Orientation::Collinear) {
    return o1 != o2 && o3 != o4;
  }
  return on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) ||
         on_segment(c, d, b);
}

// Axis-aligned closed box in lattice units.
struct BBox {
  std::int64_t xmin = 0, ymin = 0, xmax = 0, ymax = 0;

  constexpr bool contains(const Point& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
  constexpr BBox padded(std::int64_t d) const {
    return {xmin - d, ymin - d, xmax + d, ymax + d};
  }
  friend constexpr bool operator==(const BBox&, const BBox&) = default;
};

}  // namespace adaptloc

template <>
struct std::hash<adaptloc::Point> {
  std::size_t operator()(const adaptloc::Point& p) const noexcept {
    const auto ux = static_cast<std::uint64_t>(p.x() + (std::int64_t{1} << 30));
    const auto uy = static_cast<std::uint64_t>(p.y() + (std::int64_t{1} << 30));
    return std::hash<std::uint64_t>{}((ux << 32) | uy);
  }
};
