// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "waveroute/circuit.hpp"
#include "waveroute/errors.hpp"
#include "waveroute/kernels.hpp"
#include "waveroute/optics.hpp"

namespace waveroute {

/// Row-major image; pixel (row, col) drives input port at grid (row, col).
struct Image {
  int rows = 0;
  int cols = 0;
  std::vector<double> pixels;
  double at(int r, int c) const { return pixels[static_cast<std::size_t>(r * cols + c)]; }
  double& at(int r, int c) { return pixels[static_cast<std::size_t>(r * cols + c)]; }
};

/// values[f][u][v] flattened; f is the filter index (F1 = 0).
struct FeatureMap {
  int filters = static_cast<int>(kFilterCount);
  int units_u = 0;
  int units_v = 0;
  std::vector<double> values;
  double at(int f, int u, int v) const {
    return values[static_cast<std::size_t>((f * units_u + u) * units_v + v)];
  }
};

/// Drives every input port of a filter array with its pixel and reads the
/// nine filter outputs of every unit.
inline FeatureMap haar_convolve(const Circuit& c, const Image& image, const LossModel& lm,
                                const SplitModel& sm = {}) {
  if (!c.kernels) throw ParameterError("circuit carries no kernel set");
  if (image.rows < 0 || image.cols < 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.rows) * static_cast<std::size_t>(image.cols)) {
    throw ParameterError("image pixel buffer does not match its dimensions");
  }
  int grid_rows = 0;
  int grid_cols = 0;
  for (const auto& p : c.ports) {
    if (p.role != PortRole::Input) continue;
    grid_rows = std::max(grid_rows, p.grid_index.i + 1);
    grid_cols = std::max(grid_cols, p.grid_index.j + 1);
  }
  if (grid_rows != image.rows || grid_cols != image.cols) {
    throw ParameterError("image is " + std::to_string(image.rows) + "x" + std::to_string(image.cols) +
                         " but the input grid is " + std::to_string(grid_rows) + "x" +
                         std::to_string(grid_cols));
  }
  PowerMap drive;
  for (const auto& p : c.ports) {
    if (p.role != PortRole::Input) continue;
    const double v = image.at(p.grid_index.i, p.grid_index.j);
    if (!(v >= 0.0)) throw ParameterError("image intensities must be non-negative");
    drive[p.id] = v;
  }
  const PowerMap out = propagate_power(c, drive, lm, sm);

  std::array<int, kFilterCount> filter_at{};
  for (std::size_t f = 0; f < kFilterCount; ++f) {
    filter_at[static_cast<std::size_t>(c.kernels->assignment[f])] = static_cast<int>(f);
  }
  FeatureMap fm;
  fm.units_u = grid_rows / 3;
  fm.units_v = grid_cols / 3;
  fm.values.assign(kFilterCount * static_cast<std::size_t>(fm.units_u * fm.units_v), 0.0);
  for (const auto& p : c.ports) {
    if (p.role != PortRole::Output) continue;
    const int u = p.grid_index.i / 3;
    const int v = p.grid_index.j / 3;
    const int f = filter_at[static_cast<std::size_t>(3 * (p.grid_index.i % 3) + p.grid_index.j % 3)];
    fm.values[static_cast<std::size_t>((f * fm.units_u + u) * fm.units_v + v)] = out.at(p.id);
  }
  return fm;
}

}  // namespace waveroute
