// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "waveroute/errors.hpp"

namespace waveroute {

enum class ScalingMode { Crossbar2D, Volumetric3D };

struct ScalingModel {
  ScalingMode mode = ScalingMode::Volumetric3D;
  double port_pitch = 20.0;  // µm
};

struct Footprint {
  double area_mm2 = 0.0;
  double height_um = 0.0;
};

/// Crossbar2D: ports along rows and columns, area (N_I p)(N_O p), no height.
/// Volumetric3D: one pitch cell per port of the larger plane, one wiring
/// plane per input, so height = N_I p.
inline Footprint footprint(const ScalingModel& m, std::int64_t n_in, std::int64_t n_out) {
  if (!(m.port_pitch > 0.0)) throw ParameterError("port pitch must be positive");
  if (n_in < 1 || n_out < 1) throw ParameterError("port counts must be at least 1");
  const double p = m.port_pitch;
  const auto ni = static_cast<double>(n_in);
  const auto no = static_cast<double>(n_out);
  constexpr double um2_per_mm2 = 1e6;
  if (m.mode == ScalingMode::Crossbar2D) return {ni * p * no * p / um2_per_mm2, 0.0};
  return {std::max(ni, no) * p * p / um2_per_mm2, ni * p};
}

struct ScalingRow {
  std::int64_t n = 0;
  double area_2d_mm2 = 0.0;
  double area_3d_mm2 = 0.0;
  double height_3d_um = 0.0;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  std::optional<double> slope_2d;  // log-log area vs N; absent for one row
  std::optional<double> slope_3d;

  std::string csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "N,area_2d_mm2,area_3d_mm2,height_3d_um\n";
    for (const auto& r : rows) {
      os << r.n << ',' << r.area_2d_mm2 << ',' << r.area_3d_mm2 << ',' << r.height_3d_um << '\n';
    }
    return os.str();
  }
};

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("slope fit needs two or more points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParameterError("log-log fit needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) throw ParameterError("slope fit needs at least two distinct N");
  return sxy / sxx;
}

/// Footprints of an N x N interconnect in both models for each N.
inline ScalingReport scaling_report(double pitch, std::span<const std::int64_t> ns) {
  if (ns.empty()) throw ParameterError("scaling report needs at least one N");
  ScalingReport rep;
  std::vector<double> x;
  std::vector<double> a2;
  std::vector<double> a3;
  for (std::int64_t n : ns) {
    const Footprint f2 = footprint({ScalingMode::Crossbar2D, pitch}, n, n);
    const Footprint f3 = footprint({ScalingMode::Volumetric3D, pitch}, n, n);
    rep.rows.push_back({n, f2.area_mm2, f3.area_mm2, f3.height_um});
    x.push_back(static_cast<double>(n));
    a2.push_back(f2.area_mm2);
    a3.push_back(f3.area_mm2);
  }
  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() >= 2) {
    rep.slope_2d = log_log_slope(x, a2);
    rep.slope_3d = log_log_slope(x, a3);
  }
  return rep;
}

}  // namespace waveroute
