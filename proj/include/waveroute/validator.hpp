// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "waveroute/circuit.hpp"
#include "waveroute/geometry.hpp"
#include "waveroute/parallel.hpp"

namespace waveroute {

inline constexpr double kDefaultClearance = 0.5;
inline constexpr double kDefaultMinBendRadius = 2.0;

struct ClearanceViolation {
  std::string segment_a;
  std::string segment_b;
  double distance = 0.0;  // centerline distance, µm
  Point3 location;        // midpoint of the closest approach
};

struct BendViolation {
  std::string segment;
  double radius = 0.0;
};

struct ValidationOptions {
  double clearance = kDefaultClearance;
  double min_bend_radius = kDefaultMinBendRadius;
  double pitch = kDefaultSamplePitch;
};

struct ValidationReport {
  std::vector<ClearanceViolation> clearance_violations;
  std::vector<BendViolation> bend_violations;
  double min_bend_radius_found = std::numeric_limits<double>::infinity();
  double max_aspect_ratio = 0.0;
  std::vector<std::string> warnings;
  bool pass = true;
};

namespace detail {

struct Junction {
  Point3 at;
  double radius = 0.0;
};

// Branches leaving a shared node or port at angle θ stay closer than the
// clearance threshold for thr / (2 sin(θ/2)) µm. That stretch, plus a 2·d
// fillet, is treated as the junction itself.
inline std::vector<Junction> shared_junctions(const Circuit& c, const Segment& a, const Segment& b,
                                              double threshold, double len_a, double len_b) {
  std::vector<Junction> out;
  const Endpoint ends_a[2] = {a.from, a.to};
  const Endpoint ends_b[2] = {b.from, b.to};
  for (int ia = 0; ia < 2; ++ia) {
    for (int ib = 0; ib < 2; ++ib) {
      if (!(ends_a[ia] == ends_b[ib])) continue;
      const Vec3 ta = ia == 0 ? a.path.start_tangent() : -a.path.end_tangent();
      const Vec3 tb = ib == 0 ? b.path.start_tangent() : -b.path.end_tangent();
      const double theta = angle_deg(ta, tb) * std::numbers::pi / 180.0;
      const double fillet = 2.0 * std::max(a.path.diameter(), b.path.diameter());
      const double cap = std::max(fillet, 0.45 * std::min(len_a, len_b));
      const double s = std::sin(0.5 * theta);
      const double taper = s > 1e-9 ? threshold / (2.0 * s) : cap;
      out.push_back({c.position(ends_a[ia]), std::min(fillet + taper, cap)});
    }
  }
  return out;
}

struct SampledCircuit {
  std::vector<std::vector<Point3>> polylines;
  std::vector<double> lengths;
};

inline SampledCircuit sample_circuit(const Circuit& c, double pitch) {
  SampledCircuit out;
  out.polylines.resize(c.segments.size());
  out.lengths.resize(c.segments.size());
  parallel_blocks(c.segments.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out.polylines[i] = sample_path(c.segments[i].path, pitch);
      out.lengths[i] = polyline_length(out.polylines[i]);
    }
  });
  return out;
}

inline double circumradius(const Point3& a, const Point3& b, const Point3& c) {
  const double ab = distance(a, b);
  const double bc = distance(b, c);
  const double ca = distance(c, a);
  const double twice_area = norm(cross(b - a, c - a));
  // Turns below 1e-9 rad are rounding noise on a straight run.
  if (twice_area <= 1e-9 * ab * bc) return std::numeric_limits<double>::infinity();
  return ab * bc * ca / (2.0 * twice_area);
}

}  // namespace detail

/// Reports every segment pair whose centerlines come closer than
/// (d_a + d_b) / 2 + clearance, ignoring the junction region of pairs that
/// share a node or port. Sorted by (segment_a, segment_b), segment_a < segment_b.
inline std::vector<ClearanceViolation> check_clearance(const Circuit& c,
                                                       double clearance = kDefaultClearance,
                                                       double pitch = kDefaultSamplePitch) {
  if (!(clearance >= 0.0)) throw ParameterError("clearance must be non-negative");
  const auto sampled = detail::sample_circuit(c, pitch);

  struct Chunk {
    std::size_t segment;
    std::size_t first;  // first edge index
    std::size_t last;   // one past the last edge
    Aabb box;
  };
  std::vector<Chunk> chunks;
  double max_diameter = 0.0;
  double max_extent = 0.0;
  for (std::size_t s = 0; s < c.segments.size(); ++s) {
    max_diameter = std::max(max_diameter, c.segments[s].path.diameter());
    const auto& poly = sampled.polylines[s];
    for (std::size_t start = 0; start + 1 < poly.size(); start += detail::kChunkEdges) {
      Chunk ch{s, start, std::min(poly.size() - 1, start + detail::kChunkEdges), {}};
      for (std::size_t i = ch.first; i <= ch.last; ++i) ch.box.expand(poly[i]);
      max_extent = std::max(max_extent, ch.box.max_extent());
      chunks.push_back(ch);
    }
  }
  if (chunks.empty()) return {};

  // Broad phase: chunks hashed by box center into cells wide enough that any
  // two chunks within the largest threshold sit in neighbouring cells.
  const double cell = max_extent + max_diameter + clearance + 1e-9;
  auto cell_of = [&](const Point3& p) {
    return std::array<std::int64_t, 3>{static_cast<std::int64_t>(std::floor(p.x / cell)),
                                       static_cast<std::int64_t>(std::floor(p.y / cell)),
                                       static_cast<std::int64_t>(std::floor(p.z / cell))};
  };
  auto key_of = [](std::int64_t x, std::int64_t y, std::int64_t z) {
    constexpr std::int64_t off = std::int64_t{1} << 20;
    return ((x + off) << 42) | ((y + off) << 21) | (z + off);
  };
  std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const auto k = cell_of(chunks[i].box.center());
    grid[key_of(k[0], k[1], k[2])].push_back(i);
  }

  using PairKey = std::pair<std::size_t, std::size_t>;
  std::vector<std::map<PairKey, ClearanceViolation>> found(worker_slots(chunks.size()));
  parallel_blocks(chunks.size(), [&](std::size_t worker, std::size_t begin, std::size_t end) {
    auto& local = found[worker];
    std::map<PairKey, std::vector<detail::Junction>> junction_cache;
    for (std::size_t i = begin; i < end; ++i) {
      const Chunk& ca = chunks[i];
      const auto k = cell_of(ca.box.center());
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          for (std::int64_t dz = -1; dz <= 1; ++dz) {
            const auto it = grid.find(key_of(k[0] + dx, k[1] + dy, k[2] + dz));
            if (it == grid.end()) continue;
            for (std::size_t j : it->second) {
              if (j <= i) continue;
              const Chunk& cb = chunks[j];
              if (cb.segment == ca.segment) continue;
              const Segment& sa = c.segments[ca.segment];
              const Segment& sb = c.segments[cb.segment];
              const double threshold =
                  0.5 * (sa.path.diameter() + sb.path.diameter()) + clearance;
              if (aabb_distance(ca.box, cb.box) >= threshold) continue;

              const PairKey key = std::minmax(ca.segment, cb.segment);
              auto jit = junction_cache.find(key);
              if (jit == junction_cache.end()) {
                jit = junction_cache
                          .emplace(key, detail::shared_junctions(
                                            c, sa, sb, threshold, sampled.lengths[ca.segment],
                                            sampled.lengths[cb.segment]))
                          .first;
              }
              const auto& junctions = jit->second;
              auto near_junction = [&](const Point3& p, const Point3& q) {
                for (const auto& jn : junctions) {
                  if (distance(p, jn.at) < jn.radius || distance(q, jn.at) < jn.radius) return true;
                }
                return false;
              };

              const auto& pa = sampled.polylines[ca.segment];
              const auto& pb = sampled.polylines[cb.segment];
              for (std::size_t ea = ca.first; ea < ca.last; ++ea) {
                if (!junctions.empty() && near_junction(pa[ea], pa[ea + 1])) continue;
                for (std::size_t eb = cb.first; eb < cb.last; ++eb) {
                  if (!junctions.empty() && near_junction(pb[eb], pb[eb + 1])) continue;
                  const auto cp = segment_distance(pa[ea], pa[ea + 1], pb[eb], pb[eb + 1]);
                  if (cp.distance >= threshold) continue;
                  auto [vit, fresh] = local.try_emplace(key);
                  if (fresh || cp.distance < vit->second.distance) {
                    vit->second.distance = cp.distance;
                    vit->second.location = 0.5 * (cp.on_a + cp.on_b);
                  }
                }
              }
            }
          }
        }
      }
    }
  });

  std::map<PairKey, ClearanceViolation> merged;
  for (auto& local : found) {
    for (auto& [key, v] : local) {
      auto [it, fresh] = merged.try_emplace(key, v);
      if (!fresh && v.distance < it->second.distance) it->second = v;
    }
  }
  std::vector<ClearanceViolation> out;
  out.reserve(merged.size());
  for (auto& [key, v] : merged) {
    v.segment_a = c.segments[key.first].id;
    v.segment_b = c.segments[key.second].id;
    if (v.segment_b < v.segment_a) std::swap(v.segment_a, v.segment_b);
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end(), [](const ClearanceViolation& l, const ClearanceViolation& r) {
    return std::tie(l.segment_a, l.segment_b) < std::tie(r.segment_a, r.segment_b);
  });
  return out;
}

struct BendRadiusResult {
  double min_radius = std::numeric_limits<double>::infinity();
  std::vector<BendViolation> violations;
};

// Smallest three-point circumradius along each sampled centerline.
inline BendRadiusResult check_bend_radius(const Circuit& c, double r_min = kDefaultMinBendRadius,
                                          double pitch = kDefaultSamplePitch) {
  if (!(r_min > 0.0)) throw ParameterError("minimum bend radius must be positive");
  std::vector<double> per_segment(c.segments.size(), std::numeric_limits<double>::infinity());
  parallel_blocks(c.segments.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto poly = sample_path(c.segments[s].path, pitch);
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        per_segment[s] =
            std::min(per_segment[s], detail::circumradius(poly[i - 1], poly[i], poly[i + 1]));
      }
    }
  });
  BendRadiusResult out;
  for (std::size_t s = 0; s < c.segments.size(); ++s) {
    out.min_radius = std::min(out.min_radius, per_segment[s]);
    if (per_segment[s] < r_min) out.violations.push_back({c.segments[s].id, per_segment[s]});
  }
  return out;
}

struct AspectRatioResult {
  double max_ratio = 0.0;
  std::string segment;
  std::vector<std::string> warnings;
};

// Unsupported length over diameter. Informational only.
inline AspectRatioResult check_aspect_ratio(const Circuit& c) {
  AspectRatioResult out;
  for (const auto& s : c.segments) {
    const double len = arc_length(s.path);
    if (!(len > 1e-9)) {
      out.warnings.push_back("segment " + s.id + " has zero length; excluded from aspect ratio");
      continue;
    }
    const double ratio = len / s.path.diameter();
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.segment = s.id;
    }
  }
  return out;
}

inline ValidationReport validate(const Circuit& c, const ValidationOptions& opt = {}) {
  ValidationReport r;
  r.clearance_violations = check_clearance(c, opt.clearance, opt.pitch);
  auto bend = check_bend_radius(c, opt.min_bend_radius, opt.pitch);
  r.min_bend_radius_found = bend.min_radius;
  r.bend_violations = std::move(bend.violations);
  auto aspect = check_aspect_ratio(c);
  r.max_aspect_ratio = aspect.max_ratio;
  r.warnings = std::move(aspect.warnings);
  r.pass = r.clearance_violations.empty() && r.bend_violations.empty();
  return r;
}

}  // namespace waveroute
