// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "waveroute/circuit.hpp"
#include "waveroute/errors.hpp"
#include "waveroute/geometry.hpp"
#include "waveroute/io.hpp"

namespace waveroute {

inline constexpr int kDefaultMeshSides = 16;
inline constexpr double kDefaultMeshPitch = 1.0;

struct TriangleMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  double area() const {
    double a = 0.0;
    for (const auto& t : triangles) {
      a += 0.5 * norm(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
    }
    return a;
  }

  void append(const TriangleMesh& other) {
    const auto base = static_cast<std::uint32_t>(vertices.size());
    vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
    for (auto t : other.triangles) triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  }
};

namespace detail {

// Any unit vector perpendicular to t.
inline Vec3 perpendicular(const Vec3& t) {
  const Vec3 seed = std::abs(t.z) < 0.9 ? kAxisZ : kAxisX;
  return normalized(cross(t, seed));
}

}  // namespace detail

/// Closed tube of the given diameter around a centerline polyline. Rings
/// follow parallel-transport frames; each end is closed by a fan of
/// sides - 2 triangles over the ring itself.
inline TriangleMesh build_tube_mesh(std::span<const Point3> centerline, double diameter, int sides) {
  if (sides < 3) throw ParameterError("tube mesh needs at least 3 sides");
  if (centerline.size() < 2) throw ParameterError("tube mesh needs at least two centerline points");
  if (!(diameter > 0.0)) throw ParameterError("tube diameter must be positive");
  const std::size_t rings = centerline.size();
  const auto n = static_cast<std::uint32_t>(sides);
  const double r = 0.5 * diameter;

  auto tangent_at = [&](std::size_t i) {
    const Point3& a = centerline[i == 0 ? 0 : i - 1];
    const Point3& b = centerline[i + 1 == rings ? rings - 1 : i + 1];
    return normalized(b - a);
  };

  TriangleMesh m;
  m.vertices.reserve(rings * n);
  Vec3 t = tangent_at(0);
  Vec3 u = detail::perpendicular(t);
  for (std::size_t i = 0; i < rings; ++i) {
    const Vec3 t_next = tangent_at(i);
    // Transport u onto the plane normal to the new tangent.
    u = normalized(u - dot(u, t_next) * t_next);
    t = t_next;
    const Vec3 v = cross(t, u);
    for (std::uint32_t k = 0; k < n; ++k) {
      const double a = 2.0 * std::numbers::pi * k / n;
      m.vertices.push_back(centerline[i] + r * (std::cos(a) * u + std::sin(a) * v));
    }
  }
  for (std::uint32_t i = 0; i + 1 < rings; ++i) {
    for (std::uint32_t k = 0; k < n; ++k) {
      const std::uint32_t a = i * n + k;
      const std::uint32_t b = i * n + (k + 1) % n;
      const std::uint32_t c = a + n;
      const std::uint32_t d = b + n;
      m.triangles.push_back({a, b, d});
      m.triangles.push_back({a, d, c});
    }
  }
  const auto last = static_cast<std::uint32_t>((rings - 1) * n);
  for (std::uint32_t k = 1; k + 1 < n; ++k) {
    m.triangles.push_back({0, k + 1, k});
    m.triangles.push_back({last, last + k, last + k + 1});
  }
  return m;
}

inline TriangleMesh circuit_mesh(const Circuit& c, int sides = kDefaultMeshSides,
                                 double pitch = kDefaultMeshPitch) {
  if (sides < 3) throw ParameterError("tube mesh needs at least 3 sides");
  TriangleMesh all;
  for (const auto& s : c.segments) {
    const auto pts = sample_path(s.path, pitch);
    all.append(build_tube_mesh(pts, s.path.diameter(), sides));
  }
  return all;
}

/// Binary STL, little-endian.
inline std::string stl_bytes(const TriangleMesh& m, std::string_view solid_name = "waveroute") {
  std::string out(80, ' ');
  out.replace(0, std::min<std::size_t>(80, solid_name.size()), solid_name.substr(0, 80));
  auto put_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  };
  auto put_f32 = [&](double d) {
    const float f = static_cast<float>(d);
    std::uint32_t bits = 0;
    std::memcpy(&bits, &f, sizeof bits);
    put_u32(bits);
  };
  put_u32(static_cast<std::uint32_t>(m.triangles.size()));
  for (const auto& t : m.triangles) {
    const Point3& a = m.vertices[t[0]];
    const Point3& b = m.vertices[t[1]];
    const Point3& c = m.vertices[t[2]];
    const Vec3 nrm = cross(b - a, c - a);
    const double len = norm(nrm);
    const Vec3 unit = len > 0.0 ? nrm / len : Vec3{};
    for (const Vec3& v : {unit, a, b, c}) {
      put_f32(v.x);
      put_f32(v.y);
      put_f32(v.z);
    }
    out.push_back('\0');
    out.push_back('\0');
  }
  return out;
}

inline void export_mesh(const Circuit& c, const std::filesystem::path& path, int sides = kDefaultMeshSides,
                        double pitch = kDefaultMeshPitch) {
  atomic_write(path, stl_bytes(circuit_mesh(c, sides, pitch)));
}

}  // namespace waveroute
