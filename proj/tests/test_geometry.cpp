#include <gtest/gtest.h>

#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "adaptloc/geometry.hpp"

using namespace adaptloc;

TEST(Orientation, Examples) {
  EXPECT_EQ(orientation({0, 0}, {1, 0}, {0, 1}), Orientation::CounterClockwise);
  EXPECT_EQ(orientation({0, 0}, {1, 1}, {2, 2}), Orientation::Collinear);
  EXPECT_EQ(orientation({0, 0}, {0, 1}, {1, 0}), Orientation::Clockwise);
}

TEST(Orientation, ExactAgainstBigInt) {
  using boost::multiprecision::cpp_int;
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<std::int64_t> full(-kCoordBound, kCoordBound);
  std::uniform_int_distribution<std::int64_t> near(-3, 3);
  std::size_t collinear = 0;
  for (int i = 0; i < 1'000'000; ++i) {
    Point a(full(rng), full(rng)), b(full(rng), full(rng)), c;
    if (i % 4 == 0) {
      // Near-collinear: c close to an integer point on line ab.
      const std::int64_t k = near(rng);
      const std::int64_t cx = std::clamp(a.x() + k * (b.x() - a.x()) / 2, -kCoordBound, kCoordBound);
      const std::int64_t cy = std::clamp(a.y() + k * (b.y() - a.y()) / 2, -kCoordBound, kCoordBound);
      c = Point(cx, cy);
    } else if (i % 4 == 1) {
      // Exactly collinear through the extremes of the box.
      const std::int64_t t = near(rng);
      b = Point(std::clamp(a.x() + t, -kCoordBound, kCoordBound), a.y());
      c = Point(kCoordBound, a.y());
    } else {
      c = Point(full(rng), full(rng));
    }
    const cpp_int det = (cpp_int(b.x()) - a.x()) * (cpp_int(c.y()) - a.y()) -
                        (cpp_int(b.y()) - a.y()) * (cpp_int(c.x()) - a.x());
    const Orientation want = det > 0   ? Orientation::CounterClockwise
                             : det < 0 ? Orientation::Clockwise
                                       : Orientation::Collinear;
    if (want == Orientation::Collinear) ++collinear;
    ASSERT_EQ(orientation(a, b, c), want) << a.str() << b.str() << c.str();
  }
  EXPECT_GT(collinear, 1000u);
}

TEST(Orientation, ExtremeCorners) {
  const std::int64_t B = kCoordBound;
  EXPECT_EQ(orientation({-B, -B}, {B, -B}, {B, B}), Orientation::CounterClockwise);
  EXPECT_EQ(orientation({-B, -B}, {B, B}, {B, -B}), Orientation::Clockwise);
  EXPECT_EQ(orientation({-B, -B}, {B, B}, {0, 0}), Orientation::Collinear);
  EXPECT_EQ(orientation({-B, B}, {B, -B}, {B, B - 1}), Orientation::CounterClockwise);
}

TEST(Orientation, Antisymmetry) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> d(-20, 20);
  for (int i = 0; i < 100000; ++i) {
    Point a(d(rng), d(rng)), b(d(rng), d(rng)), c(d(rng), d(rng));
    const auto o = orientation(a, b, c);
    if (o == Orientation::Collinear) {
      EXPECT_EQ(orientation(a, c, b), Orientation::Collinear);
    } else {
      EXPECT_EQ(orientation(a, c, b), reverse(o));
    }
  }
}

TEST(PointBounds, RejectsOutOfRange) {
  EXPECT_NO_THROW(Point(kCoordBound, -kCoordBound));
  EXPECT_THROW(Point(kCoordBound + 1, 0), CoordinateOutOfBounds);
  EXPECT_THROW(Point(0, -kCoordBound - 1), CoordinateOutOfBounds);
}

TEST(LexLess, Examples) {
  EXPECT_TRUE(lex_less({1, 5}, {2, 0}));
  EXPECT_TRUE(lex_less({3, 1}, {3, 2}));
  EXPECT_FALSE(lex_less({4, 4}, {4, 4}));
}

TEST(LexLess, StrictTotalOrder) {
  std::vector<Point> pts;
  for (int x = -2; x <= 2; ++x) {
    for (int y = -2; y <= 2; ++y) pts.emplace_back(x, y);
  }
  for (const auto& p : pts) {
    EXPECT_FALSE(lex_less(p, p));
    for (const auto& q : pts) {
      if (!(p == q)) {
        EXPECT_NE(lex_less(p, q), lex_less(q, p));
      }
      for (const auto& r : pts) {
        if (lex_less(p, q) && lex_less(q, r)) {
          EXPECT_TRUE(lex_less(p, r));
        }
      }
    }
  }
}

TEST(SidePerturbed, Examples) {
  EXPECT_EQ(side_of_segment_perturbed({0, 5}, {{-1, 0}, {1, 0}}), Side::Above);
  EXPECT_EQ(side_of_segment_perturbed({0, 0}, {{-1, -1}, {1, 1}}), Side::Below);
  EXPECT_EQ(side_of_segment_perturbed({0, 0}, {{-1, 0}, {1, 0}}), Side::Above);
}

TEST(SidePerturbed, DirectionIndependentAndEndpointErrors) {
  EXPECT_EQ(side_of_segment_perturbed({0, 0}, {{1, 1}, {-1, -1}}), Side::Below);
  EXPECT_EQ(side_of_segment_perturbed({0, 3}, {{0, 0}, {0, 5}}),
            side_of_segment_perturbed({0, 3}, {{0, 5}, {0, 0}}));
  EXPECT_THROW(side_of_segment_perturbed({1, 1}, {{1, 1}, {3, 0}}), EndpointQuery);
}

TEST(SidePerturbed, VerticalSegmentUsesShear) {
  // Sheared, the segment (0,0)-(0,5) leans right; a point on it beyond ε lies right-below.
  EXPECT_EQ(side_of_segment_perturbed({0, 2}, {{0, 0}, {0, 5}}), Side::Below);
  EXPECT_EQ(side_of_segment_perturbed({-1, 2}, {{0, 0}, {0, 5}}), Side::Above);
}

TEST(TrianglePerturbed, Examples) {
  const Triangle t{Point{0, 0}, Point{4, 0}, Point{0, 4}};
  EXPECT_TRUE(point_in_triangle_perturbed({1, 1}, t));
  EXPECT_FALSE(point_in_triangle_perturbed({5, 5}, t));
  EXPECT_FALSE(point_in_triangle_perturbed({2, 2}, t));
}

TEST(TrianglePerturbed, VerticesBelongToOneNeighbour) {
  // Fan of triangles around (0,0): each lattice point in [-3,3]^2 lies in exactly one.
  const std::vector<Point> ring{{3, 0}, {3, 3}, {0, 3}, {-3, 3}, {-3, 0}, {-3, -3}, {0, -3}, {3, -3}};
  std::vector<Triangle> fan;
  for (std::size_t i = 0; i < ring.size(); ++i) fan.push_back({Point{0, 0}, ring[i], ring[(i + 1) % ring.size()]});
  for (int x = -2; x <= 2; ++x) {
    for (int y = -2; y <= 2; ++y) {
      int hits = 0;
      for (const auto& t : fan) hits += point_in_triangle_perturbed({x, y}, t);
      EXPECT_EQ(hits, 1) << x << "," << y;
    }
  }
}
