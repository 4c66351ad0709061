// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"

namespace {

using namespace waveroute;
using wrtest::circular_arc;
using wrtest::straight;

// Gravesen adaptive subdivision: independent arc-length oracle.
double subdivided_length(const std::array<Point3, 4>& p, int depth = 0) {
  const double chord = distance(p[0], p[3]);
  const double poly = distance(p[0], p[1]) + distance(p[1], p[2]) + distance(p[2], p[3]);
  if (poly - chord < 1e-13 || depth > 40) return 0.5 * (chord + poly);
  const Point3 a = 0.5 * (p[0] + p[1]);
  const Point3 b = 0.5 * (p[1] + p[2]);
  const Point3 c = 0.5 * (p[2] + p[3]);
  const Point3 ab = 0.5 * (a + b);
  const Point3 bc = 0.5 * (b + c);
  const Point3 m = 0.5 * (ab + bc);
  return subdivided_length({p[0], a, ab, m}, depth + 1) + subdivided_length({m, bc, c, p[3]}, depth + 1);
}

WaveguidePath random_path(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  std::vector<Point3> pts;
  Point3 p{u(rng), u(rng), u(rng)};
  pts.push_back(p);
  const int segs = 1 + static_cast<int>(rng() % 3);
  Vec3 handle{u(rng), u(rng), u(rng)};
  for (int k = 0; k < segs; ++k) {
    pts.push_back(pts.back() + handle / 3.0);
    const Point3 end{u(rng), u(rng), u(rng)};
    handle = Vec3{u(rng), u(rng), u(rng)};
    pts.push_back(end - handle / 3.0);
    pts.push_back(end);
  }
  return WaveguidePath(pts);
}

TEST(WaveguidePath, RejectsMalformedInput) {
  EXPECT_THROW(WaveguidePath({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}}), ParameterError);
  EXPECT_THROW(WaveguidePath({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {0, 0, 4}}), ParameterError);
  EXPECT_THROW(straight({0, 0, 0}, {0, 0, 1}, 0.0), ParameterError);
  EXPECT_THROW(straight({0, 0, 0}, {0, 0, 1}, -1.0), ParameterError);
  EXPECT_THROW(straight({0, 0, 0}, {0, 0, std::nan("")}), ParameterError);
  // Kinked joint: incoming along +z, outgoing along +x.
  EXPECT_THROW(WaveguidePath({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {1, 0, 3}, {2, 0, 3}, {3, 0, 3}}),
               ParameterError);
}

TEST(WaveguidePath, DefaultsAndAccessors) {
  const auto p = straight({0, 0, 0}, {0, 0, -20});
  EXPECT_DOUBLE_EQ(p.diameter(), 1.2);
  EXPECT_EQ(p.segment_count(), 1u);
  EXPECT_EQ(p.front(), (Point3{0, 0, 0}));
  EXPECT_EQ(p.back(), (Point3{0, 0, -20}));
  EXPECT_NEAR(dot(p.start_tangent(), Vec3{0, 0, -1}), 1.0, 1e-12);
}

TEST(WaveguidePath, AcceptsNearlySmoothJoint) {
  const double tilt = std::tan(0.5 * std::numbers::pi / 180.0);
  EXPECT_NO_THROW(WaveguidePath({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {tilt, 0, 4}, {0, 0, 5}, {0, 0, 6}}));
}

TEST(SamplePath, StraightVertical) {
  const auto pts = sample_path(straight({0, 0, 0}, {0, 0, 10}), 5.0);
  ASSERT_GE(pts.size(), 3u);
  EXPECT_EQ(pts.front(), (Point3{0, 0, 0}));
  EXPECT_EQ(pts.back(), (Point3{0, 0, 10}));
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LE(distance(pts[i - 1], pts[i]), 5.0 + 1e-9);
}

TEST(SamplePath, CoarsePitchGivesEndpointsOnly) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto path = random_path(rng);
    const auto pts = sample_path(path, arc_length(path) * 1.5);
    EXPECT_GE(pts.size(), 2u);
    EXPECT_LE(pts.size(), 3u);
    EXPECT_EQ(pts.front(), path.front());
    EXPECT_EQ(pts.back(), path.back());
  }
}

TEST(SamplePath, RejectsBadPitch) {
  const auto p = straight({0, 0, 0}, {0, 0, 10});
  EXPECT_THROW(sample_path(p, 0.0), ParameterError);
  EXPECT_THROW(sample_path(p, -1.0), ParameterError);
}

TEST(SamplePath, QuarterBendLength) {
  const auto arc = circular_arc(10.0, 0.0, std::numbers::pi / 2);
  const auto pts = sample_path(arc, 0.1);
  const double quarter = std::numbers::pi / 2 * 10.0;
  EXPECT_NEAR(polyline_length(pts), quarter, 1e-3 * quarter);
  // Quadrature agrees with adaptive subdivision.
  const auto seg = arc.segment(0);
  EXPECT_NEAR(arc_length(arc), subdivided_length(seg.p), 1e-9);
}

TEST(SamplePath, SpacingNeverExceedsPitchOnRandomPaths) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto path = random_path(rng);
    const double pitch = 0.3 + (rng() % 100) / 20.0;
    const auto pts = sample_path(path, pitch);
    EXPECT_EQ(pts.front(), path.front());
    EXPECT_EQ(pts.back(), path.back());
    const double total = arc_length(path);
    const double step = total / static_cast<double>(pts.size() - 1);
    EXPECT_LE(step, pitch + 1e-12);
    for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LE(distance(pts[i - 1], pts[i]), pitch + 1e-9);
    // Equal arc-length steps: the polyline is never longer than the curve.
    EXPECT_LE(polyline_length(pts), total + 1e-9);
  }
}

TEST(ArcLength, MatchesSubdivisionOracleOnRandomCubics) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto path = random_path(rng);
    double oracle = 0.0;
    for (std::size_t k = 0; k < path.segment_count(); ++k) oracle += subdivided_length(path.segment(k).p);
    EXPECT_NEAR(arc_length(path), oracle, 1e-6 * oracle);
  }
}

TEST(MakeBend, ZeroBowIsStraight) {
  const Vec3 down{0, 0, -1};
  const auto p = make_bend({0, 0, 0}, {0, 0, -20}, down, down, 0.0);
  for (const auto& q : sample_path(p, 0.5)) {
    EXPECT_NEAR(q.x, 0.0, 1e-12);
    EXPECT_NEAR(q.y, 0.0, 1e-12);
  }
}

TEST(MakeBend, OppositeBowsMirrorAcrossYZPlaneForVerticalChord) {
  const Vec3 down{0, 0, -1};
  const auto a = make_bend({0, 0, 0}, {0, 0, -20}, down, down, 5.0);
  const auto b = make_bend({0, 0, 0}, {0, 0, -20}, down, down, -5.0);
  ASSERT_EQ(a.control_points().size(), b.control_points().size());
  for (std::size_t i = 0; i < a.control_points().size(); ++i) {
    const auto& p = a.control_points()[i];
    const auto& q = b.control_points()[i];
    EXPECT_NEAR(p.x, -q.x, 1e-9);
    EXPECT_NEAR(p.y, q.y, 1e-9);
    EXPECT_NEAR(p.z, q.z, 1e-9);
  }
  const auto mid_a = sample_path(a, 0.01);
  EXPECT_NEAR(mid_a[mid_a.size() / 2].x, 5.0, 0.1);
}

TEST(MakeBend, MirrorThroughChordPlaneOnRandomBends) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Point3 p0{u(rng), u(rng), 100.0};
    const Point3 p1{u(rng), u(rng), 0.0};
    const Vec3 chord = p1 - p0;
    // Tangents in the plane spanned by the chord and z.
    const Vec3 t = normalized(chord + Vec3{0, 0, u(rng)});
    const double bow = u(rng) / 4.0;
    const auto a = make_bend(p0, p1, t, t, bow);
    const auto b = make_bend(p0, p1, t, t, -bow);
    const Vec3 n = normalized(cross(chord, kAxisZ));
    for (std::size_t i = 0; i < a.control_points().size(); ++i) {
      const Point3& p = a.control_points()[i];
      const Point3 mirrored = p - 2.0 * dot(p - p0, n) * n;
      EXPECT_LT(distance(mirrored, b.control_points()[i]), 1e-9);
    }
  }
}

TEST(MakeBend, EndTangentsMatch) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Vec3 t0 = normalized(Vec3{u(rng), u(rng), -2.0});
    const Vec3 t1 = normalized(Vec3{u(rng), u(rng), -2.0});
    const auto p = make_bend({0, 0, 60}, {20 * u(rng), 20 * u(rng), 0}, t0, t1, 10 * u(rng), 5 * u(rng));
    EXPECT_LT(angle_deg(p.start_tangent(), t0), 1.0);
    EXPECT_LT(angle_deg(p.end_tangent(), t1), 1.0);
  }
}

TEST(MakeBend, LateralOffsetAgainstChord) {
  const Vec3 down{0, 0, -1};
  const Point3 p0{0, 0, 0};
  const Point3 p1{20, 0, -60};
  const auto p = make_bend(p0, p1, down, down, 5.0);
  const auto pts = sample_path(p, 0.01);
  const Vec3 axis = normalized(p1 - p0);
  const Vec3 lateral = normalized(cross(axis, kAxisZ));
  double best = 0.0;
  for (const auto& q : pts) {
    const Vec3 off = (q - p0) - dot(q - p0, axis) * axis;
    best = std::max(best, dot(off, lateral));
  }
  EXPECT_NEAR(best, 5.0, 0.1);
  const auto& mid = pts[pts.size() / 2];
  EXPECT_NEAR(dot((mid - p0) - dot(mid - p0, axis) * axis, lateral), 5.0, 0.1);
}

TEST(MakeBend, Errors) {
  const Vec3 down{0, 0, -1};
  EXPECT_THROW(make_bend({1, 2, 3}, {1, 2, 3}, down, down, 1.0), DegenerateError);
  EXPECT_THROW(make_bend({0, 0, 0}, {0, 0, -5}, Vec3{0, 0, -2}, down, 1.0), ParameterError);
}

TEST(TwistedBranch, EndpointsAndSmoothness) {
  const Point3 p0{0, 0, 80};
  const Point3 p1{20, -20, 0};
  const auto p = make_twisted_branch(p0, p1, 0.2);
  EXPECT_EQ(p.front(), p0);
  EXPECT_EQ(p.back(), p1);
  EXPECT_GT(p.segment_count(), 1u);
  // Start heading is the chord's lateral direction turned by the twist.
  const Vec3 t = p.start_tangent();
  const double heading = std::atan2(t.y, t.x) - std::atan2(-20.0, 20.0);
  EXPECT_GT(heading, 0.0);
}

TEST(TwistedBranch, ZeroTwistIsTheChord) {
  const Point3 p0{3, 4, 80};
  const Point3 p1{-17, 24, 0};
  for (const auto& q : sample_path(make_twisted_branch(p0, p1, 0.0), 0.5)) {
    const Vec3 off = cross(q - p0, normalized(p1 - p0));
    EXPECT_LT(norm(off), 1e-9);
  }
}

TEST(TwistedBranch, VerticalChordIsStraight) {
  const auto p = make_twisted_branch({5, 5, 80}, {5, 5, 0}, 0.3);
  EXPECT_EQ(p.segment_count(), 1u);
  for (const auto& q : p.control_points()) {
    EXPECT_DOUBLE_EQ(q.x, 5.0);
    EXPECT_DOUBLE_EQ(q.y, 5.0);
  }
}

TEST(TwistedBranch, OppositeTwistMirrors) {
  const auto a = make_twisted_branch({0, 0, 80}, {20, 20, 0}, 0.2);
  const auto b = make_twisted_branch({0, 0, 80}, {-20, 20, 0}, -0.2);
  ASSERT_EQ(a.control_points().size(), b.control_points().size());
  for (std::size_t i = 0; i < a.control_points().size(); ++i) {
    EXPECT_NEAR(a.control_points()[i].x, -b.control_points()[i].x, 1e-12);
    EXPECT_NEAR(a.control_points()[i].y, b.control_points()[i].y, 1e-12);
    EXPECT_NEAR(a.control_points()[i].z, b.control_points()[i].z, 1e-12);
  }
}

TEST(TwistedBranch, FollowsAnalyticSwirl) {
  const Point3 p0{0, 0, 80};
  const Vec3 c{40, 20, -80};
  const double twist = 0.21;
  const auto path = make_twisted_branch(p0, p0 + c, twist);
  // Each Hermite piece interpolates the analytic curve at its ends; check
  // densely that the fit stays close to it between knots.
  for (const auto& q : sample_path(path, 0.5)) {
    const double t = (p0.z - q.z) / -c.z;
    const double f = twist * (1.0 - t);
    const Point3 exact{t * (std::cos(f) * c.x - std::sin(f) * c.y), t * (std::sin(f) * c.x + std::cos(f) * c.y), q.z};
    EXPECT_LT(distance(q, exact), 0.01);
  }
}

TEST(SegmentDistance, ClosedFormCases) {
  EXPECT_NEAR(segment_distance({0, 0, 0}, {10, 0, 0}, {0, 5, -3}, {10, 5, 3}).distance, 5.0, 1e-12);
  EXPECT_NEAR(segment_distance({0, 0, 0}, {1, 0, 0}, {3, 0, 0}, {4, 0, 0}).distance, 2.0, 1e-12);
  EXPECT_NEAR(segment_distance({0, 0, 0}, {0, 0, 0}, {0, 3, 4}, {0, 3, 4}).distance, 5.0, 1e-12);
  EXPECT_NEAR(segment_distance({0, 0, 0}, {2, 0, 0}, {1, -1, 1}, {1, 1, 1}).distance, 1.0, 1e-12);
}

TEST(MinPairDistance, ParallelLines) {
  const auto a = straight({0, 0, 0}, {0, 0, -60});
  const auto b = straight({20, 0, 0}, {20, 0, -60});
  EXPECT_DOUBLE_EQ(min_pair_distance(a, b), 20.0);
}

TEST(MinPairDistance, SelfIsZero) {
  const auto a = make_bend({0, 0, 80}, {20, 20, 0}, normalized(Vec3{1, 1, -4}), normalized(Vec3{1, 1, -4}), 3.0);
  EXPECT_DOUBLE_EQ(min_pair_distance(a, a), 0.0);
}

TEST(MinPairDistance, SkewLines) {
  const auto a = straight({0, 0, 0}, {10, 0, 0});
  const auto b = straight({0, 5, -3}, {10, 5, 3});
  const double pitch = 0.25;
  EXPECT_NEAR(min_pair_distance(a, b, pitch), 5.0, pitch);
}

TEST(MinPairDistance, SymmetricAndMatchesBruteForce) {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_path(rng);
    const auto b = random_path(rng);
    const double ab = min_pair_distance(a, b, 0.5);
    EXPECT_DOUBLE_EQ(ab, min_pair_distance(b, a, 0.5));
    const auto pa = sample_path(a, 0.5);
    const auto pb = sample_path(b, 0.5);
    double brute = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < pa.size(); ++i) {
      for (std::size_t j = 1; j < pb.size(); ++j) {
        brute = std::min(brute, segment_distance(pa[i - 1], pa[i], pb[j - 1], pb[j]).distance);
      }
    }
    EXPECT_NEAR(ab, brute, 1e-9);
  }
}

}  // namespace
