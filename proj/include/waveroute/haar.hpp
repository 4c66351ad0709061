// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "waveroute/circuit.hpp"
#include "waveroute/errors.hpp"
#include "waveroute/fractal.hpp"
#include "waveroute/geometry.hpp"
#include "waveroute/kernels.hpp"
#include "waveroute/parallel.hpp"
#include "waveroute/validator.hpp"

namespace waveroute {

/// n! as an exact integer. Throws ParameterError when it does not fit.
inline std::uint64_t assignment_space_size(int n_filters) {
  if (n_filters < 1) throw ParameterError("filter count must be at least 1");
  std::uint64_t f = 1;
  for (int k = 2; k <= n_filters; ++k) {
    if (f > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(k)) {
      throw ParameterError(std::to_string(n_filters) + "! overflows 64 bits");
    }
    f *= static_cast<std::uint64_t>(k);
  }
  return f;
}

struct AssignmentResult {
  std::vector<int> permutation;  // filter f -> position permutation[f]
  double cost = 0.0;
};

namespace detail {

// a beats b when its cost is lower by more than rounding noise.
inline bool strictly_cheaper(double a, double b) {
  return a < b - 1e-12 * std::max(std::abs(a), std::abs(b));
}

inline double permutation_cost(const std::vector<std::vector<double>>& cost,
                               const std::vector<int>& perm) {
  double s = 0.0;
  for (std::size_t f = 0; f < perm.size(); ++f) s += cost[f][static_cast<std::size_t>(perm[f])];
  return s;
}

}  // namespace detail

/// Exhaustive assignment search over an n x n cost matrix (cost[f][pos]).
/// Returns the cheapest permutation; among permutations within rounding
/// noise of each other the lexicographically smallest wins.
inline AssignmentResult optimize_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  if (n == 0) throw ParameterError("assignment needs at least one filter");
  assignment_space_size(static_cast<int>(n));
  if (n > 12) throw ParameterError("exhaustive assignment search is limited to 12 filters");
  for (const auto& row : cost) {
    if (row.size() != n) throw ParameterError("assignment cost matrix must be square");
  }

  // One task per leading element, reduced in order.
  std::vector<AssignmentResult> best(n);
  parallel_blocks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t first = begin; first < end; ++first) {
      std::vector<int> perm(n);
      perm[0] = static_cast<int>(first);
      std::size_t k = 1;
      for (std::size_t v = 0; v < n; ++v) {
        if (v != first) perm[k++] = static_cast<int>(v);
      }
      AssignmentResult local{perm, detail::permutation_cost(cost, perm)};
      while (std::next_permutation(perm.begin() + 1, perm.end())) {
        const double c = detail::permutation_cost(cost, perm);
        if (detail::strictly_cheaper(c, local.cost)) local = {perm, c};
      }
      best[first] = std::move(local);
    }
  });
  AssignmentResult out = best[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (detail::strictly_cheaper(best[i].cost, out.cost)) out = best[i];
  }
  return out;
}

struct HaarGeometry {
  double d0 = 20.0;      // input and output pitch, µm
  double height = 80.0;  // input plane above output plane, µm
  void validate() const {
    if (!(d0 > 0.0) || !(height > 0.0)) throw ParameterError("Haar pitch and height must be positive");
  }
};

// Unit-local positions with the unit centre on the z axis.
inline Point3 haar_input_position(int p, int q, const HaarGeometry& g) {
  return {(p - 1) * g.d0, (q - 1) * g.d0, g.height};
}

inline Point3 haar_output_position(int pos, const HaarGeometry& g) {
  return {(pos / 3 - 1) * g.d0, (pos % 3 - 1) * g.d0, 0.0};
}

/// cost[f][pos]: straight-chord wire length of filter f if it feeds position pos.
inline std::vector<std::vector<double>> assignment_costs(const KernelSet& ks, const HaarGeometry& g) {
  std::vector<std::vector<double>> cost(kFilterCount, std::vector<double>(kFilterCount, 0.0));
  for (std::size_t f = 0; f < kFilterCount; ++f) {
    for (int pos = 0; pos < 9; ++pos) {
      double s = 0.0;
      for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) {
          if (ks.kernels[f].weights[p][q]) {
            s += distance(haar_input_position(p, q, g), haar_output_position(pos, g));
          }
        }
      }
      cost[f][static_cast<std::size_t>(pos)] = s;
    }
  }
  return cost;
}

/// Evaluates all 9! filter-to-port assignments by total chord length.
inline AssignmentResult optimize_port_assignment(const KernelSet& ks, const HaarGeometry& g = {}) {
  ks.validate();
  g.validate();
  return optimize_assignment(assignment_costs(ks, g));
}

struct FilterUnitOptions {
  HaarGeometry geometry;
  Chirality chirality = Chirality::Left;
  double twist_deg = 12.0;  // swirl of each connection about its input axis
  double diameter = kDefaultDiameter;
  bool validate = true;
};

namespace detail {

inline std::string filter_name(std::size_t f) { return "F" + std::to_string(f + 1); }

// Appends one unit whose input (p, q) sits at image pixel (row0 + p, col0 + q).
inline void append_filter_unit(Circuit& c, const KernelSet& ks, const FilterUnitOptions& o,
                               const Point3& centre, int row0, int col0, const std::string& prefix) {
  const double twist = chirality_sign(o.chirality) * o.twist_deg * std::numbers::pi / 180.0;
  std::array<std::size_t, 9> in_port{};
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) {
      in_port[static_cast<std::size_t>(3 * p + q)] = c.ports.size();
      c.ports.push_back({"in_" + std::to_string(row0 + p) + "_" + std::to_string(col0 + q),
                         {row0 + p, col0 + q},
                         centre + haar_input_position(p, q, o.geometry),
                         PortRole::Input});
    }
  }
  std::array<std::size_t, kFilterCount> out_port{};
  for (std::size_t f = 0; f < kFilterCount; ++f) {
    const int pos = ks.assignment[f];
    out_port[f] = c.ports.size();
    c.ports.push_back({prefix + "out_" + filter_name(f),
                       {row0 + pos / 3, col0 + pos % 3},
                       centre + haar_output_position(pos, o.geometry),
                       PortRole::Output});
  }
  for (std::size_t f = 0; f < kFilterCount; ++f) {
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) {
        if (!ks.kernels[f].weights[p][q]) continue;
        const std::size_t from = in_port[static_cast<std::size_t>(3 * p + q)];
        c.segments.push_back({"s" + std::to_string(c.segments.size()),
                              make_twisted_branch(c.ports[from].position, c.ports[out_port[f]].position,
                                                  twist, o.diameter),
                              Endpoint::port(from), Endpoint::port(out_port[f])});
      }
    }
  }
}

inline void fill_haar_meta(Circuit& c, const KernelSet& ks, const FilterUnitOptions& o) {
  c.meta.generator = "haar";
  c.meta.params = {{"d0", o.geometry.d0},
                   {"height", o.geometry.height},
                   {"chirality", chirality_sign(o.chirality)},
                   {"twist_deg", o.twist_deg},
                   {"diameter", o.diameter}};
  c.kernels = ks;
}

inline void require_collision_free(const Circuit& c) {
  const auto violations = check_clearance(c, kDefaultClearance);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw GenerationError("waveguides " + v.segment_a + " and " + v.segment_b +
                          " collide (centreline distance " +
                          std::to_string(v.distance) + " um)");
  }
}

}  // namespace detail

/// Nine-input, nine-output filter unit: input (p, q) is wired straight to the
/// output port of filter f iff K_f(p, q) = 1. Inputs and outputs both sit on
/// 3x3 grids at pitch D0 centred on the z axis.
inline Circuit generate_filter_unit(const KernelSet& ks, const FilterUnitOptions& o = {}) {
  ks.validate();
  o.geometry.validate();
  if (!(o.diameter > 0.0)) throw ParameterError("waveguide diameter must be positive");
  Circuit c;
  c.meta.name = "haar_unit";
  detail::fill_haar_meta(c, ks, o);
  detail::append_filter_unit(c, ks, o, Point3{}, 0, 0, "");
  if (o.validate) detail::require_collision_free(c);
  return c;
}

inline Circuit generate_filter_unit(const KernelSet& ks, double d0, double height) {
  FilterUnitOptions o;
  o.geometry = {d0, height};
  return generate_filter_unit(ks, o);
}

/// Stride-3 array of (image_side / 3)^2 units covering an image_side^2 input
/// grid at pitch D0. Unit (u, v) owns pixels [3u, 3u + 3) x [3v, 3v + 3).
inline Circuit tile_filter_array(const KernelSet& ks, int image_side, const FilterUnitOptions& o = {}) {
  ks.validate();
  o.geometry.validate();
  if (image_side < 3 || image_side % 3 != 0) {
    throw ParameterError("image side must be a positive multiple of 3, got " + std::to_string(image_side));
  }
  const int units = image_side / 3;
  Circuit c;
  c.meta.name = "haar_array_" + std::to_string(image_side);
  detail::fill_haar_meta(c, ks, o);
  c.meta.params["image_side"] = image_side;
  const double d = o.geometry.d0;
  for (int u = 0; u < units; ++u) {
    for (int v = 0; v < units; ++v) {
      const Point3 centre{(3 * u + 1) * d, (3 * v + 1) * d, 0.0};
      detail::append_filter_unit(c, ks, o, centre, 3 * u, 3 * v,
                                 "u" + std::to_string(u) + "_" + std::to_string(v) + "_");
    }
  }
  if (o.validate) detail::require_collision_free(c);
  return c;
}

inline Circuit tile_filter_array(const KernelSet& ks, int image_side, double d0) {
  FilterUnitOptions o;
  o.geometry.d0 = d0;
  return tile_filter_array(ks, image_side, o);
}

}  // namespace waveroute
