#include <gtest/gtest.h>

#include <random>

#include "glsig/errors.hpp"
#include "glsig/geometry.hpp"

using namespace glsig;

TEST(PolyLine, RejectsBadInput) {
  EXPECT_THROW(PolyLine({{0, 0, 0}}), InvalidGeometry);
  EXPECT_THROW(PolyLine({{0, 0, 0}, {0, 0, 0}}), InvalidGeometry);
  EXPECT_THROW(PolyLine({{0, 0, 0}, {NAN, 0, 0}}), InvalidGeometry);
}

TEST(PolyLine, LengthAndReverse) {
  const PolyLine l({{0, 0, 0}, {3, 0, 0}, {3, 4, 0}});
  EXPECT_DOUBLE_EQ(l.length(), 7.0);
  const PolyLine r = l.reversed();
  EXPECT_EQ(r.front(), l.back());
  EXPECT_EQ(r.back(), l.front());
  EXPECT_DOUBLE_EQ(r.length(), 7.0);
}

TEST(PolyLoop, NeedsThreePointsAndClosesImplicitly) {
  EXPECT_THROW(PolyLoop({{0, 0, 0}, {1, 0, 0}}), InvalidGeometry);
  const PolyLoop sq({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  EXPECT_EQ(sq.segment_count(), 4u);
  EXPECT_EQ(sq.segment_end(3), sq.segment_start(0));
  EXPECT_DOUBLE_EQ(sq.length(), 4.0);
}

TEST(PolyLoop, SubdivisionKeepsLength) {
  const PolyLoop sq({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  const PolyLoop s = sq.subdivided(3);
  EXPECT_EQ(s.size(), 5u);
  EXPECT_TRUE(s.points()[4].isApprox(Point3(0, 0.5, 0)));
  EXPECT_DOUBLE_EQ(s.length(), 4.0);
}

TEST(Skeleton, NamesAreUnique) {
  const PolyLoop c = make_circle({0, 0, 0}, Vec3::UnitZ(), 1.0, 8);
  EXPECT_THROW(Skeleton({{"a", c, 0.0}, {"a", c, 0.0}}), InvalidGeometry);
  const Skeleton s({{"a", c, 0.0}, {"b", c, 0.0}});
  EXPECT_EQ(s.index_of("b"), 1);
  EXPECT_EQ(s.index_of("zz"), -1);
  EXPECT_EQ(s.find("zz"), nullptr);
}

TEST(Circle, PointsLieOnCircle) {
  const Vec3 n = Vec3(1, 2, 3).normalized();
  const PolyLoop c = make_circle({1, 1, 1}, n, 0.5, 17);
  for (const auto& p : c.points()) {
    EXPECT_NEAR((p - Point3(1, 1, 1)).norm(), 0.5, 1e-12);
    EXPECT_NEAR((p - Point3(1, 1, 1)).dot(n), 0.0, 1e-12);
  }
}

TEST(Distance, PointSegment) {
  double t = -1;
  EXPECT_DOUBLE_EQ(point_segment_dist({0.5, 2, 0}, {0, 0, 0}, {1, 0, 0}, &t), 2.0);
  EXPECT_DOUBLE_EQ(t, 0.5);
  EXPECT_DOUBLE_EQ(point_segment_dist({-3, 4, 0}, {0, 0, 0}, {1, 0, 0}, &t), 5.0);
  EXPECT_DOUBLE_EQ(t, 0.0);
}

// Segment distance against dense sampling of both segments.
TEST(Distance, SegmentSegmentMatchesSampling) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 200; ++k) {
    const Vec3 p0(u(rng), u(rng), u(rng)), p1(u(rng), u(rng), u(rng));
    const Vec3 q0(u(rng), u(rng), u(rng)), q1(u(rng), u(rng), u(rng));
    double s, t;
    const double d2 = segment_segment_dist2(p0, p1, q0, q1, &s, &t);
    EXPECT_NEAR(((p0 + s * (p1 - p0)) - (q0 + t * (q1 - q0))).squaredNorm(), d2,
                1e-12);
    double best = INFINITY;
    for (int i = 0; i <= 200; ++i) {
      const Vec3 a = p0 + (i / 200.0) * (p1 - p0);
      best = std::min(best, point_segment_dist(a, q0, q1));
    }
    EXPECT_LE(std::sqrt(d2), best + 1e-12);
    EXPECT_GE(std::sqrt(d2), best - 0.02);
  }
}

TEST(Distance, ParallelSegments) {
  EXPECT_DOUBLE_EQ(segment_segment_dist2({0, 0, 0}, {1, 0, 0}, {0.5, 1, 0}, {2, 1, 0}),
                   1.0);
  EXPECT_DOUBLE_EQ(segment_segment_dist2({0, 0, 0}, {1, 0, 0}, {3, 0, 0}, {4, 0, 0}),
                   4.0);
}
