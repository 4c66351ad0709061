// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "waveroute/circuit.hpp"
#include "waveroute/errors.hpp"
#include "waveroute/geometry.hpp"
#include "waveroute/io.hpp"

namespace waveroute {

inline constexpr double kDefaultToolpathPitch = 0.5;

/// One "x y z" block per waveguide, blank-line separated. Blocks are written
/// lowest-first by their minimum z, each polyline running upward.
inline std::string toolpath_string(const Circuit& c, double pitch = kDefaultToolpathPitch) {
  if (!(pitch > 0.0)) throw ParameterError("toolpath pitch must be positive");
  std::vector<std::vector<Point3>> blocks;
  blocks.reserve(c.segments.size());
  std::vector<double> min_z;
  for (const auto& s : c.segments) {
    auto pts = sample_path(s.path, pitch);
    if (pts.back().z < pts.front().z) std::reverse(pts.begin(), pts.end());
    double lo = pts.front().z;
    for (const auto& p : pts) lo = std::min(lo, p.z);
    min_z.push_back(lo);
    blocks.push_back(std::move(pts));
  }
  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return min_z[a] < min_z[b]; });

  // Avoid printing "-0.0000".
  auto fmt = [](double v) { return std::abs(v) < 5e-5 ? 0.0 : v; };
  std::string out;
  char line[96];
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0) out += '\n';
    for (const auto& p : blocks[order[k]]) {
      std::snprintf(line, sizeof line, "%.4f %.4f %.4f\n", fmt(p.x), fmt(p.y), fmt(p.z));
      out += line;
    }
  }
  return out;
}

inline void export_toolpath(const Circuit& c, const std::filesystem::path& path,
                            double pitch = kDefaultToolpathPitch) {
  atomic_write(path, toolpath_string(c, pitch));
}

}  // namespace waveroute
