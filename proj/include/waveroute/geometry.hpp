// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "waveroute/errors.hpp"

namespace waveroute {

// All lengths are in micrometers. z is the optical axis; light travels
// toward -z, from the input plane down to the output plane at z = 0.

inline constexpr double kDefaultDiameter = 1.2;
inline constexpr double kDefaultSamplePitch = 0.25;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

using Point3 = Vec3;

inline constexpr Vec3 kAxisX{1.0, 0.0, 0.0};
inline constexpr Vec3 kAxisZ{0.0, 0.0, 1.0};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }

inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  if (!(n > 0.0)) throw DegenerateError("cannot normalize a zero-length vector");
  return a / n;
}

inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Angle between two directions in degrees; both must be non-zero.
inline double angle_deg(const Vec3& a, const Vec3& b) {
  const double c = dot(a, b) / (norm(a) * norm(b));
  return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

struct CubicBezier {
  std::array<Point3, 4> p;

  Point3 eval(double t) const {
    const double u = 1.0 - t;
    return (u * u * u) * p[0] + (3.0 * u * u * t) * p[1] + (3.0 * u * t * t) * p[2] +
           (t * t * t) * p[3];
  }

  Vec3 derivative(double t) const {
    const double u = 1.0 - t;
    return (3.0 * u * u) * (p[1] - p[0]) + (6.0 * u * t) * (p[2] - p[1]) +
           (3.0 * t * t) * (p[3] - p[2]);
  }

  // Unit tangent at t; falls back to the chord for collapsed handles.
  Vec3 tangent(double t) const {
    Vec3 d = derivative(t);
    if (norm(d) > 1e-12) return normalized(d);
    d = p[3] - p[0];
    return norm(d) > 0.0 ? normalized(d) : Vec3{};
  }
};

namespace detail {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

inline double speed_integral(const CubicBezier& c, double t0, double t1) {
  const double half = 0.5 * (t1 - t0);
  const double mid = 0.5 * (t1 + t0);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
    sum += kGaussWeights[i] * norm(c.derivative(mid + half * kGaussNodes[i]));
  }
  return sum * half;
}

// Cumulative arc length of one cubic at uniform parameter breakpoints.
class ArcLengthTable {
 public:
  static constexpr int kIntervals = 16;

  explicit ArcLengthTable(const CubicBezier& c) : curve_(c) {
    cumulative_[0] = 0.0;
    for (int k = 0; k < kIntervals; ++k) {
      const double t0 = static_cast<double>(k) / kIntervals;
      const double t1 = static_cast<double>(k + 1) / kIntervals;
      cumulative_[k + 1] = cumulative_[k] + speed_integral(c, t0, t1);
    }
  }

  double length() const { return cumulative_[kIntervals]; }

  // Parameter t with arc_length(0, t) == s, to ~1e-12 µm.
  double invert(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= length()) return 1.0;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const int k = std::clamp(static_cast<int>(it - cumulative_.begin()) - 1, 0, kIntervals - 1);
    double lo = static_cast<double>(k) / kIntervals;
    double hi = static_cast<double>(k + 1) / kIntervals;
    const double base_t = lo;
    const double base_s = cumulative_[k];
    const double span = cumulative_[k + 1] - base_s;
    double t = span > 0.0 ? lo + (hi - lo) * (s - base_s) / span : lo;
    for (int iter = 0; iter < 50; ++iter) {
      const double f = base_s + speed_integral(curve_, base_t, t) - s;
      if (std::abs(f) < 1e-12) break;
      if (f > 0.0) {
        hi = t;
      } else {
        lo = t;
      }
      const double speed = norm(curve_.derivative(t));
      double next = speed > 1e-12 ? t - f / speed : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      t = next;
    }
    return t;
  }

 private:
  CubicBezier curve_;
  std::array<double, kIntervals + 1> cumulative_{};
};

}  // namespace detail

/// A waveguide centerline made of cubic Bézier segments that share endpoints,
/// plus the waveguide diameter.
///
/// Control points are laid out as p0 p1 p2 p3 p4 p5 p6 ..., where segment k
/// uses points 3k..3k+3. Interior joints must be tangent-continuous within 1°.
class WaveguidePath {
 public:
  static constexpr double kJointToleranceDeg = 1.0;

  WaveguidePath() = default;

  explicit WaveguidePath(std::vector<Point3> control_points, double diameter = kDefaultDiameter)
      : control_points_(std::move(control_points)), diameter_(diameter) {
    if (control_points_.size() < 4 || control_points_.size() % 3 != 1) {
      throw ParameterError("waveguide path needs 3k+1 control points (k >= 1), got " +
                           std::to_string(control_points_.size()));
    }
    if (!(diameter_ > 0.0) || !std::isfinite(diameter_)) {
      throw ParameterError("waveguide diameter must be positive");
    }
    for (const auto& p : control_points_) {
      if (!is_finite(p)) throw ParameterError("waveguide control point is not finite");
    }
    for (std::size_t k = 1; k < segment_count(); ++k) {
      const Point3& joint = control_points_[3 * k];
      const Vec3 in = joint - control_points_[3 * k - 1];
      const Vec3 out = control_points_[3 * k + 1] - joint;
      if (norm(in) < 1e-12 || norm(out) < 1e-12) continue;
      if (angle_deg(in, out) > kJointToleranceDeg) {
        throw ParameterError("waveguide path is not tangent-continuous at joint " +
                             std::to_string(k));
      }
    }
  }

  std::size_t segment_count() const {
    return control_points_.empty() ? 0 : (control_points_.size() - 1) / 3;
  }

  CubicBezier segment(std::size_t k) const {
    return {{control_points_[3 * k], control_points_[3 * k + 1], control_points_[3 * k + 2],
             control_points_[3 * k + 3]}};
  }

  const std::vector<Point3>& control_points() const { return control_points_; }
  double diameter() const { return diameter_; }
  const Point3& front() const { return control_points_.front(); }
  const Point3& back() const { return control_points_.back(); }

  Vec3 start_tangent() const { return segment(0).tangent(0.0); }
  Vec3 end_tangent() const { return segment(segment_count() - 1).tangent(1.0); }

  friend bool operator==(const WaveguidePath&, const WaveguidePath&) = default;

 private:
  std::vector<Point3> control_points_;
  double diameter_ = kDefaultDiameter;
};

inline double arc_length(const CubicBezier& c) { return detail::ArcLengthTable(c).length(); }

inline double arc_length(const WaveguidePath& path) {
  double total = 0.0;
  for (std::size_t k = 0; k < path.segment_count(); ++k) total += arc_length(path.segment(k));
  return total;
}

inline double polyline_length(std::span<const Point3> pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += distance(pts[i - 1], pts[i]);
  return total;
}

/// Samples the centerline at equal arc-length steps no longer than `pitch`.
/// The first and last samples are the path endpoints.
inline std::vector<Point3> sample_path(const WaveguidePath& path, double pitch) {
  if (!(pitch > 0.0) || !std::isfinite(pitch)) {
    throw ParameterError("sample pitch must be positive");
  }
  std::vector<detail::ArcLengthTable> tables;
  std::vector<double> offsets{0.0};
  tables.reserve(path.segment_count());
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    tables.emplace_back(path.segment(k));
    offsets.push_back(offsets.back() + tables.back().length());
  }
  const double total = offsets.back();
  // The 1e-9 slack keeps an exact multiple (10 µm at pitch 5) from gaining an
  // extra interval through round-off.
  const auto intervals =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total / pitch - 1e-9)));
  const double step = total / static_cast<double>(intervals);

  std::vector<Point3> out;
  out.reserve(intervals + 1);
  out.push_back(path.front());
  std::size_t seg = 0;
  for (std::size_t i = 1; i < intervals; ++i) {
    const double s = step * static_cast<double>(i);
    while (seg + 1 < tables.size() && s > offsets[seg + 1]) ++seg;
    const double t = tables[seg].invert(s - offsets[seg]);
    out.push_back(path.segment(seg).eval(t));
  }
  out.push_back(path.back());
  return out;
}

/// Builds a bend from p0 to p1 leaving along t0 and arriving along t1.
///
/// The path is two C¹-joined cubics meeting at a waypoint placed `bow` µm off
/// the chord midpoint along normalize(chord × z) (the x axis when the chord is
/// vertical), plus `z_bow` µm along z. The waypoint tangent is the chord
/// direction. Flipping the sign of `bow` mirrors the path through the plane
/// spanned by the chord and the z axis whenever t0 and t1 lie in that plane.
inline WaveguidePath make_bend(const Point3& p0, const Point3& p1, const Vec3& t0, const Vec3& t1,
                               double bow, double z_bow = 0.0,
                               double diameter = kDefaultDiameter) {
  const Vec3 chord = p1 - p0;
  const double len = norm(chord);
  if (!(len > 0.0)) throw DegenerateError("bend endpoints coincide");
  if (std::abs(norm(t0) - 1.0) > 1e-6 || std::abs(norm(t1) - 1.0) > 1e-6) {
    throw ParameterError("bend tangents must be unit vectors");
  }
  const Vec3 axis = chord / len;
  const double planar = std::hypot(chord.x, chord.y);
  const Vec3 lateral =
      planar > 1e-12 * len ? Vec3{chord.y / planar, -chord.x / planar, 0.0} : kAxisX;
  const Point3 mid = 0.5 * (p0 + p1) + bow * lateral + z_bow * kAxisZ;

  const double h0 = distance(p0, mid) / 3.0;
  const double h1 = distance(mid, p1) / 3.0;
  return WaveguidePath({p0, p0 + h0 * t0, mid - h0 * axis, mid, mid + h1 * axis, p1 - h1 * t1, p1},
                       diameter);
}

/// Branch from p0 to p1 that swirls about the vertical axis through p0.
///
/// At fraction τ of the way down, the point is p0 + (R(φ(1-τ)) c_xy τ, c_z τ)
/// where c = p1 - p0 and R rotates about z. The start direction is turned by
/// `twist_rad` and the rotation unwinds linearly to zero at p1. The curve is
/// fitted with `pieces` C¹-joined cubic Hermite segments. A vertical chord
/// gives a straight line.
inline WaveguidePath make_twisted_branch(const Point3& p0, const Point3& p1, double twist_rad,
                                         double diameter = kDefaultDiameter, int pieces = 8) {
  const Vec3 c = p1 - p0;
  if (!(norm(c) > 0.0)) throw DegenerateError("branch endpoints coincide");
  if (pieces < 1) throw ParameterError("branch needs at least one piece");
  auto at = [&](double t) {
    const double f = twist_rad * (1.0 - t);
    const double cf = std::cos(f);
    const double sf = std::sin(f);
    return Point3{p0.x + t * (cf * c.x - sf * c.y), p0.y + t * (sf * c.x + cf * c.y), p0.z + t * c.z};
  };
  auto velocity = [&](double t) {
    const double f = twist_rad * (1.0 - t);
    const double cf = std::cos(f);
    const double sf = std::sin(f);
    const double rx = cf * c.x - sf * c.y;
    const double ry = sf * c.x + cf * c.y;
    // d/dt of t R(f) c with df/dt = -twist: R c - t twist R' c, and R' c = (-ry, rx).
    return Vec3{rx + t * twist_rad * ry, ry - t * twist_rad * rx, c.z};
  };
  if (std::hypot(c.x, c.y) <= 1e-12 * norm(c)) pieces = 1;
  std::vector<Point3> pts{p0};
  const double h = 1.0 / pieces;
  for (int k = 0; k < pieces; ++k) {
    const double ta = k * h;
    const double tb = k == pieces - 1 ? 1.0 : (k + 1) * h;
    const Point3 b = k == pieces - 1 ? p1 : at(tb);
    pts.push_back(pts.back() + (h / 3.0) * velocity(ta));
    pts.push_back(b - (h / 3.0) * velocity(tb));
    pts.push_back(b);
  }
  return WaveguidePath(std::move(pts), diameter);
}

struct ClosestPoints {
  double distance = std::numeric_limits<double>::infinity();
  Point3 on_a;
  Point3 on_b;
};

/// Closest points between segments [a0,a1] and [b0,b1] (Ericson, RTCD 5.1.9).
inline ClosestPoints segment_distance(const Point3& a0, const Point3& a1, const Point3& b0,
                                      const Point3& b1) {
  constexpr double eps = 1e-18;
  const Vec3 d1 = a1 - a0;
  const Vec3 d2 = b1 - b0;
  const Vec3 r = a0 - b0;
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);
  double s = 0.0;
  double t = 0.0;
  if (a <= eps && e <= eps) {
    s = t = 0.0;
  } else if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      s = denom > eps * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  ClosestPoints out;
  out.on_a = a0 + s * d1;
  out.on_b = b0 + t * d2;
  out.distance = distance(out.on_a, out.on_b);
  return out;
}

struct Aabb {
  Point3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  Point3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

  void expand(const Point3& p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  Point3 center() const { return 0.5 * (lo + hi); }
  double max_extent() const { return std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z}); }
};

inline double aabb_distance(const Aabb& a, const Aabb& b) {
  const double dx = std::max({0.0, a.lo.x - b.hi.x, b.lo.x - a.hi.x});
  const double dy = std::max({0.0, a.lo.y - b.hi.y, b.lo.y - a.hi.y});
  const double dz = std::max({0.0, a.lo.z - b.hi.z, b.lo.z - a.hi.z});
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

namespace detail {

inline constexpr std::size_t kChunkEdges = 8;

inline std::vector<Aabb> chunk_boxes(std::span<const Point3> poly) {
  std::vector<Aabb> boxes;
  for (std::size_t start = 0; start + 1 < poly.size(); start += kChunkEdges) {
    Aabb box;
    const std::size_t end = std::min(poly.size() - 1, start + kChunkEdges);
    for (std::size_t i = start; i <= end; ++i) box.expand(poly[i]);
    boxes.push_back(box);
  }
  return boxes;
}

}  // namespace detail

/// Minimum segment-to-segment distance between two polylines.
inline ClosestPoints polyline_distance(std::span<const Point3> a, std::span<const Point3> b) {
  ClosestPoints best;
  if (a.empty() || b.empty()) return best;
  // A lone point is treated as a zero-length edge.
  const std::array<Point3, 2> lone_a{a.front(), a.front()};
  const std::array<Point3, 2> lone_b{b.front(), b.front()};
  if (a.size() == 1) a = lone_a;
  if (b.size() == 1) b = lone_b;
  const auto boxes_a = detail::chunk_boxes(a);
  const auto boxes_b = detail::chunk_boxes(b);
  struct Pair {
    double bound;
    std::size_t ca;
    std::size_t cb;
  };
  std::vector<Pair> pairs;
  pairs.reserve(boxes_a.size() * boxes_b.size());
  for (std::size_t i = 0; i < boxes_a.size(); ++i) {
    for (std::size_t j = 0; j < boxes_b.size(); ++j) {
      pairs.push_back({aabb_distance(boxes_a[i], boxes_b[j]), i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) {
    return l.bound < r.bound || (l.bound == r.bound && (l.ca < r.ca || (l.ca == r.ca && l.cb < r.cb)));
  });
  for (const auto& pr : pairs) {
    if (pr.bound > best.distance) break;
    const std::size_t ia0 = pr.ca * detail::kChunkEdges;
    const std::size_t ia1 = std::min(a.size() - 1, ia0 + detail::kChunkEdges);
    const std::size_t ib0 = pr.cb * detail::kChunkEdges;
    const std::size_t ib1 = std::min(b.size() - 1, ib0 + detail::kChunkEdges);
    for (std::size_t i = ia0; i < ia1; ++i) {
      for (std::size_t j = ib0; j < ib1; ++j) {
        const auto cp = segment_distance(a[i], a[i + 1], b[j], b[j + 1]);
        if (cp.distance < best.distance) best = cp;
      }
    }
  }
  return best;
}

/// Minimum centerline distance between two waveguides sampled at `pitch`.
inline double min_pair_distance(const WaveguidePath& a, const WaveguidePath& b,
                                double pitch = kDefaultSamplePitch) {
  const auto pa = sample_path(a, pitch);
  const auto pb = sample_path(b, pitch);
  // Keep the result symmetric in its arguments.
  const auto ab = polyline_distance(pa, pb).distance;
  const auto ba = polyline_distance(pb, pa).distance;
  return std::min(ab, ba);
}

}  // namespace waveroute
