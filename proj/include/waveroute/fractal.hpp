// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "waveroute/circuit.hpp"
#include "waveroute/errors.hpp"
#include "waveroute/geometry.hpp"

namespace waveroute {

enum class Chirality { Left, Right };

inline double chirality_sign(Chirality c) { return c == Chirality::Left ? 1.0 : -1.0; }

/// Parameters of a fractal fan-out coupler family.
struct FractalSpec {
  int b = 9;                  // branching ratio, a perfect square >= 4
  int layers = 1;             // bifurcation layers L
  double d0 = 20.0;           // output pitch, µm
  double height_factor = 4.0; // H_L = height_factor * d0
  Chirality chirality = Chirality::Left;
  double diameter = kDefaultDiameter;

  // Swirl of every off-axis branch about its parent's vertical axis, degrees.
  // The sign follows the chirality.
  double twist_deg = 12.0;

  static constexpr std::int64_t kMaxOutputs = 50'000'000;

  int side() const { return static_cast<int>(std::lround(std::sqrt(static_cast<double>(b)))); }

  void validate() const {
    if (b < 4 || side() * side() != b) {
      throw ParameterError("branching ratio must be a perfect square >= 4, got " + std::to_string(b));
    }
    if (layers < 1) throw ParameterError("fractal coupler needs at least one layer");
    if (!(d0 > 0.0) || !std::isfinite(d0)) throw ParameterError("output pitch D0 must be positive");
    if (!(height_factor > 0.0) || !std::isfinite(height_factor)) {
      throw ParameterError("height factor must be positive");
    }
    if (!(diameter > 0.0)) throw ParameterError("waveguide diameter must be positive");
    if (!(twist_deg >= 0.0 && twist_deg < 90.0)) {
      throw ParameterError("branch twist must be in [0, 90) degrees");
    }
    double outputs = 1.0;
    for (int l = 0; l < layers; ++l) outputs *= b;
    if (outputs > static_cast<double>(kMaxOutputs)) {
      throw ParameterError("b^L exceeds the supported output count");
    }
  }

  std::int64_t output_count() const {
    std::int64_t n = 1;
    for (int l = 0; l < layers; ++l) n *= b;
    return n;
  }

  // Outputs per side of one coupler's square output grid, sqrt(b)^L.
  std::int64_t output_side() const {
    std::int64_t n = 1;
    for (int l = 0; l < layers; ++l) n *= side();
    return n;
  }

  // Vertical run from the input port down to the first bifurcation node.
  double input_lead() const { return diameter; }
};

/// Per-layer dimensions, index 0 is layer l = 1 (top), index L-1 is l = L.
struct LayerDims {
  std::vector<double> height;  // H_l
  std::vector<double> pitch;   // D_l

  double total_height() const {
    double h = 0.0;
    for (double v : height) h += v;
    return h;
  }
};

inline LayerDims layer_dimensions(const FractalSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.layers);
  const double scale = std::sqrt(static_cast<double>(spec.b));
  LayerDims dims;
  dims.height.assign(n, 0.0);
  dims.pitch.assign(n, 0.0);
  dims.pitch[n - 1] = spec.d0;
  dims.height[n - 1] = spec.height_factor * spec.d0;
  for (std::size_t l = n - 1; l-- > 0;) {
    dims.pitch[l] = scale * dims.pitch[l + 1];
    dims.height[l] = scale * dims.height[l + 1];
  }
  return dims;
}

struct BranchAngles {
  double axial_deg = 0.0;
  double diagonal_deg = 0.0;
};

// Angles of the outermost axis-aligned and diagonal branches from the z axis.
// D_l / H_l is the same for every layer, so one pair describes the circuit.
inline BranchAngles branch_angle(const FractalSpec& spec) {
  const auto dims = layer_dimensions(spec);
  const double max_offset = 0.5 * (spec.side() - 1) * dims.pitch[0];
  const double h = dims.height[0];
  constexpr double deg = 180.0 / std::numbers::pi;
  return {std::atan(max_offset / h) * deg, std::atan(std::numbers::sqrt2 * max_offset / h) * deg};
}

namespace detail {

// Lateral coordinates are tracked in integer half-D0 units so that positions
// reached through different fan-outs compare exactly.
struct HalfUnits {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend auto operator<=>(const HalfUnits&, const HalfUnits&) = default;
};

struct FractalInput {
  HalfUnits at;
  GridIndex grid;
};

inline Circuit build_fractal(const FractalSpec& spec, Point3 origin,
                             const std::vector<FractalInput>& inputs, std::string name) {
  spec.validate();
  const auto dims = layer_dimensions(spec);
  const int side = spec.side();
  const int layers = spec.layers;
  const double total = dims.total_height();
  const double half = 0.5 * spec.d0;
  const double sign = chirality_sign(spec.chirality);

  // Height of the layer-l nodes above the output plane; index L is the plane.
  std::vector<double> level_z(static_cast<std::size_t>(layers) + 1, 0.0);
  for (int l = layers - 1; l >= 0; --l) {
    level_z[static_cast<std::size_t>(l)] = level_z[static_cast<std::size_t>(l) + 1] +
                                           dims.height[static_cast<std::size_t>(l)];
  }
  // Child offsets at layer l are odd/even multiples of stride[l] = D_l / D0.
  std::vector<std::int64_t> stride(static_cast<std::size_t>(layers), 1);
  for (int l = layers - 2; l >= 0; --l) {
    stride[static_cast<std::size_t>(l)] = stride[static_cast<std::size_t>(l) + 1] * side;
  }

  auto place = [&](HalfUnits u, double z) {
    return Point3{origin.x + half * static_cast<double>(u.x),
                  origin.y + half * static_cast<double>(u.y), origin.z + z};
  };

  Circuit c;
  c.meta.name = std::move(name);
  c.meta.generator = "fractal";
  c.meta.params = {{"b", spec.b},
                   {"layers", spec.layers},
                   {"d0", spec.d0},
                   {"height_factor", spec.height_factor},
                   {"chirality", sign},
                   {"diameter", spec.diameter},
                   {"twist_deg", spec.twist_deg},
                   {"total_height", total},
                   {"input_lead", spec.input_lead()}};

  for (const auto& in : inputs) {
    c.ports.push_back({"in_" + std::to_string(in.grid.i) + "_" + std::to_string(in.grid.j),
                       in.grid, place(in.at, total + spec.input_lead()), PortRole::Input});
  }

  std::vector<HalfUnits> node_units;
  const double twist = sign * spec.twist_deg * std::numbers::pi / 180.0;
  auto add_segment = [&](Endpoint from, Endpoint to, const Point3& p0, const Point3& p1) {
    c.segments.push_back({"s" + std::to_string(c.segments.size()),
                          make_twisted_branch(p0, p1, twist, spec.diameter), from, to});
    if (from.kind == Endpoint::Kind::Node) c.nodes[from.index].children.push_back(c.segments.size() - 1);
  };

  // Trunks: input port down to its layer-1 node.
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::size_t node = c.nodes.size();
    c.nodes.push_back({"n" + std::to_string(node), place(inputs[i].at, level_z[0]), 1, {}});
    node_units.push_back(inputs[i].at);
    const Vec3 down{0.0, 0.0, -1.0};
    c.segments.push_back({"s" + std::to_string(c.segments.size()),
                          make_bend(c.ports[i].position, c.nodes[node].position, down, down, 0.0,
                                    0.0, spec.diameter),
                          Endpoint::port(i), Endpoint::node(node)});
  }

  // Output ports are collected by position first and numbered afterwards.
  std::map<HalfUnits, std::size_t> output_at;
  std::vector<HalfUnits> output_units;
  struct PendingSegment {
    std::size_t segment;
    std::size_t output;
  };
  std::vector<PendingSegment> pending;

  std::size_t layer_begin = 0;
  for (int l = 0; l < layers; ++l) {
    std::map<HalfUnits, std::size_t> node_at;  // merges coincident nodes within this layer only
    const std::size_t layer_end = c.nodes.size();
    const auto li = static_cast<std::size_t>(l);
    const bool last = l == layers - 1;
    for (std::size_t n = layer_begin; n < layer_end; ++n) {
      const HalfUnits parent = node_units[n];
      const Point3 p0 = c.nodes[n].position;
      for (int a = 0; a < side; ++a) {
        for (int bb = 0; bb < side; ++bb) {
          const std::int64_t ox = (2 * a - (side - 1)) * stride[li];
          const std::int64_t oy = (2 * bb - (side - 1)) * stride[li];
          const HalfUnits child{parent.x + ox, parent.y + oy};
          const Point3 p1 = place(child, level_z[li + 1]);
          if (!last) {
            auto [it, fresh] = node_at.emplace(child, c.nodes.size());
            if (fresh) {
              c.nodes.push_back({"n" + std::to_string(c.nodes.size()), p1, l + 2, {}});
              node_units.push_back(child);
            }
            add_segment(Endpoint::node(n), Endpoint::node(it->second), p0, p1);
          } else {
            auto [it, fresh] = output_at.emplace(child, output_units.size());
            if (fresh) output_units.push_back(child);
            add_segment(Endpoint::node(n), Endpoint::port(0), p0, p1);
            pending.push_back({c.segments.size() - 1, it->second});
          }
        }
      }
    }
    layer_begin = layer_end;
  }

  // Number outputs by grid index (row-major over x then y).
  std::int64_t min_x = 0;
  std::int64_t min_y = 0;
  if (!output_units.empty()) {
    min_x = output_units.front().x;
    min_y = output_units.front().y;
    for (const auto& u : output_units) {
      min_x = std::min(min_x, u.x);
      min_y = std::min(min_y, u.y);
    }
  }
  std::vector<std::size_t> order(output_units.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return output_units[l] < output_units[r];
  });
  std::vector<std::size_t> port_of(output_units.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const auto& u = output_units[order[rank]];
    const GridIndex g{static_cast<int>((u.x - min_x) / 2), static_cast<int>((u.y - min_y) / 2)};
    port_of[order[rank]] = c.ports.size();
    c.ports.push_back({"out_" + std::to_string(g.i) + "_" + std::to_string(g.j), g,
                       place(u, 0.0), PortRole::Output});
  }
  for (const auto& p : pending) c.segments[p.segment].to = Endpoint::port(port_of[p.output]);
  return c;
}

}  // namespace detail

/// Single 1 x b^L coupler hanging below the input port at `input`.
inline Circuit generate_coupler(const FractalSpec& spec, const Point3& input) {
  spec.validate();
  const double total = layer_dimensions(spec).total_height();
  const Point3 origin{input.x, input.y, input.z - total - spec.input_lead()};
  return detail::build_fractal(spec, origin, {{{0, 0}, {0, 0}}},
                               "coupler_1x" + std::to_string(spec.output_count()));
}

/// Single coupler with its output plane at z = 0, centred on the z axis.
inline Circuit generate_coupler(const FractalSpec& spec) {
  spec.validate();
  return detail::build_fractal(spec, Point3{}, {{{0, 0}, {0, 0}}},
                               "coupler_1x" + std::to_string(spec.output_count()));
}

/// n x m couplers on an input grid centered on the z axis. Fan-outs land on a
/// shared output grid; coincident outputs and coincident bifurcation nodes are
/// merged so each position hosts a single port or node.
inline Circuit generate_coupler_array(const FractalSpec& spec, int n, int m,
                                      double input_pitch = 0.0) {
  spec.validate();
  if (input_pitch == 0.0) input_pitch = spec.d0;
  if (n < 1 || m < 1) throw ParameterError("input grid must be at least 1x1");
  const double ratio = input_pitch / spec.d0;
  const auto steps = static_cast<std::int64_t>(std::llround(ratio));
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw ParameterError("input pitch must be a positive integer multiple of D0");
  }
  std::vector<detail::FractalInput> inputs;
  inputs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      inputs.push_back({{(2 * i - (n - 1)) * steps, (2 * j - (m - 1)) * steps}, {i, j}});
    }
  }
  auto c = detail::build_fractal(spec, {0.0, 0.0, 0.0}, inputs,
                                 "coupler_array_" + std::to_string(n) + "x" + std::to_string(m));
  c.meta.params["grid_n"] = n;
  c.meta.params["grid_m"] = m;
  c.meta.params["input_pitch"] = input_pitch;
  return c;
}

}  // namespace waveroute
