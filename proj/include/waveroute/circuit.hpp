// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "waveroute/errors.hpp"
#include "waveroute/geometry.hpp"
#include "waveroute/kernels.hpp"

namespace waveroute {

enum class PortRole { Input, Output };

inline std::string_view to_string(PortRole r) { return r == PortRole::Input ? "input" : "output"; }

struct GridIndex {
  int i = 0;
  int j = 0;
  friend auto operator<=>(const GridIndex&, const GridIndex&) = default;
};

struct Port {
  std::string id;
  GridIndex grid_index;
  Point3 position;
  PortRole role = PortRole::Input;
  friend bool operator==(const Port&, const Port&) = default;
};

struct BifurcationNode {
  std::string id;
  Point3 position;
  int layer = 1;
  std::vector<std::size_t> children;  // indices into Circuit::segments
  friend bool operator==(const BifurcationNode&, const BifurcationNode&) = default;
};

// Segment endpoint: either a port or a bifurcation node, by index.
struct Endpoint {
  enum class Kind { Port, Node };
  Kind kind = Kind::Port;
  std::size_t index = 0;

  static Endpoint port(std::size_t i) { return {Kind::Port, i}; }
  static Endpoint node(std::size_t i) { return {Kind::Node, i}; }
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct Segment {
  std::string id;
  WaveguidePath path;
  Endpoint from;
  Endpoint to;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct CircuitMeta {
  std::string name;
  std::string generator;
  std::map<std::string, double> params;
  friend bool operator==(const CircuitMeta&, const CircuitMeta&) = default;
};

/// Ports, bifurcation nodes and the waveguide segments wiring them, directed
/// from the input plane toward the output plane.
struct Circuit {
  CircuitMeta meta;
  std::vector<Port> ports;
  std::vector<BifurcationNode> nodes;
  std::vector<Segment> segments;
  std::optional<KernelSet> kernels;

  std::size_t count(PortRole role) const {
    std::size_t n = 0;
    for (const auto& p : ports) n += p.role == role ? 1 : 0;
    return n;
  }

  std::optional<std::size_t> find_port(std::string_view id) const {
    for (std::size_t i = 0; i < ports.size(); ++i) {
      if (ports[i].id == id) return i;
    }
    return std::nullopt;
  }

  const Point3& position(const Endpoint& e) const {
    return e.kind == Endpoint::Kind::Port ? ports.at(e.index).position : nodes.at(e.index).position;
  }

  const std::string& id_of(const Endpoint& e) const {
    return e.kind == Endpoint::Kind::Port ? ports.at(e.index).id : nodes.at(e.index).id;
  }

  // Ports occupy vertices [0, ports.size()), nodes follow.
  std::size_t vertex_count() const { return ports.size() + nodes.size(); }
  std::size_t vertex(const Endpoint& e) const {
    return e.kind == Endpoint::Kind::Port ? e.index : ports.size() + e.index;
  }

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// Vertex order in which every segment goes from an earlier to a later vertex.
/// Throws StructuralError when the segment graph has a cycle.
inline std::vector<std::size_t> topological_order(const Circuit& c) {
  const std::size_t n = c.vertex_count();
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& s : c.segments) {
    const auto u = c.vertex(s.from);
    const auto v = c.vertex(s.to);
    if (u >= n || v >= n) throw StructuralError("segment " + s.id + " references a missing endpoint");
    out[u].push_back(v);
    ++indegree[v];
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const auto u = ready.top();
    ready.pop();
    order.push_back(u);
    for (auto v : out[u]) {
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  if (order.size() != n) throw StructuralError("segment graph contains a cycle");
  return order;
}

/// Checks the structural invariants every generated circuit must satisfy.
/// Throws StructuralError describing the first violation.
inline void check_structure(const Circuit& c) {
  topological_order(c);

  std::optional<double> in_z;
  std::optional<double> out_z;
  std::map<std::tuple<double, double, double, int>, std::string> seen;
  for (const auto& p : c.ports) {
    auto& plane = p.role == PortRole::Input ? in_z : out_z;
    if (!plane) plane = p.position.z;
    if (std::abs(*plane - p.position.z) > 1e-9) {
      throw StructuralError("port " + p.id + " is off its " + std::string(to_string(p.role)) +
                            " plane");
    }
    const auto key = std::make_tuple(p.position.x, p.position.y, p.position.z,
                                     static_cast<int>(p.role));
    if (auto [it, fresh] = seen.emplace(key, p.id); !fresh) {
      throw StructuralError("ports " + it->second + " and " + p.id + " coincide");
    }
  }
  if (in_z && out_z && std::abs(*in_z - *out_z) < 1e-9) {
    throw StructuralError("input and output planes coincide");
  }

  if (auto b = c.meta.params.find("b"); b != c.meta.params.end()) {
    for (const auto& node : c.nodes) {
      if (static_cast<double>(node.children.size()) > b->second) {
        throw StructuralError("node " + node.id + " has more children than the branching ratio");
      }
    }
  }

  // Every output must be reachable from some input.
  std::vector<std::vector<std::size_t>> out(c.vertex_count());
  for (const auto& s : c.segments) out[c.vertex(s.from)].push_back(c.vertex(s.to));
  std::vector<bool> reached(c.vertex_count(), false);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < c.ports.size(); ++i) {
    if (c.ports[i].role == PortRole::Input) {
      reached[i] = true;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : out[u]) {
      if (!reached[v]) {
        reached[v] = true;
        stack.push_back(v);
      }
    }
  }
  for (std::size_t i = 0; i < c.ports.size(); ++i) {
    if (c.ports[i].role == PortRole::Output && !reached[i]) {
      throw StructuralError("output port " + c.ports[i].id + " is unreachable");
    }
  }
}

}  // namespace waveroute
