// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include <unistd.h>

#include "json.hpp"
#include "waveroute/circuit.hpp"
#include "waveroute/convolution.hpp"
#include "waveroute/errors.hpp"
#include "waveroute/kernels.hpp"
#include "waveroute/optics.hpp"
#include "waveroute/validator.hpp"

namespace waveroute {

using Json = nlohmann::json;

inline constexpr int kNetlistFormatVersion = 1;

/// Writes `data` to a sibling temporary file, then renames it over `path`.
inline void atomic_write(const std::filesystem::path& path, std::string_view data) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path.string());
  return s;
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw IoError(what + " is not valid JSON: " + e.what());
  }
}

namespace detail {

inline Json point_json(const Point3& p) { return Json::array({p.x, p.y, p.z}); }

inline Point3 point_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw IoError("position must be an [x, y, z] array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Infinite values (e.g. a straight circuit's bend radius) become null.
inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace detail

inline Json kernels_to_json(const KernelSet& ks) {
  Json filters = Json::array();
  for (const auto& k : ks.kernels) {
    Json rows = Json::array();
    for (const auto& row : k.weights) rows.push_back({int{row[0]}, int{row[1]}, int{row[2]}});
    filters.push_back(rows);
  }
  return {{"filters", filters}, {"assignment", ks.assignment}};
}

/// Accepts a bare kernels block or any document with a "kernels" member.
inline KernelSet kernels_from_json(const Json& doc) {
  const Json& j = doc.contains("kernels") ? doc.at("kernels") : doc;
  try {
    KernelSet ks;
    const Json& filters = j.at("filters");
    if (!filters.is_array() || filters.size() != kFilterCount) {
      throw IoError("kernel set must list exactly 9 filters");
    }
    for (std::size_t f = 0; f < kFilterCount; ++f) {
      const Json& rows = filters[f];
      if (!rows.is_array() || rows.size() != 3) throw IoError("each filter must have 3 rows");
      for (std::size_t p = 0; p < 3; ++p) {
        if (!rows[p].is_array() || rows[p].size() != 3) throw IoError("each filter row must have 3 weights");
        for (std::size_t q = 0; q < 3; ++q) {
          const int w = rows[p][q].get<int>();
          if (w != 0 && w != 1) throw IoError("filter weights must be 0 or 1");
          ks.kernels[f].weights[p][q] = w == 1;
        }
      }
    }
    if (j.contains("assignment")) ks.assignment = j.at("assignment").get<std::array<int, kFilterCount>>();
    ks.validate();
    return ks;
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed kernel set: ") + e.what());
  }
}

inline Json circuit_to_json(const Circuit& c) {
  Json meta = {{"name", c.meta.name},
               {"generator", c.meta.generator},
               {"format_version", kNetlistFormatVersion},
               {"units", {{"length", "um"}, {"loss", "dB"}}},
               {"params", c.meta.params}};
  Json ports = Json::array();
  for (const auto& p : c.ports) {
    ports.push_back({{"id", p.id},
                     {"role", to_string(p.role)},
                     {"grid_index", {p.grid_index.i, p.grid_index.j}},
                     {"position", detail::point_json(p.position)}});
  }
  Json nodes = Json::array();
  for (const auto& n : c.nodes) {
    nodes.push_back({{"id", n.id}, {"layer", n.layer}, {"position", detail::point_json(n.position)}});
  }
  auto ref = [&](const Endpoint& e) {
    return Json{{"kind", e.kind == Endpoint::Kind::Port ? "port" : "node"}, {"id", c.id_of(e)}};
  };
  Json segments = Json::array();
  for (const auto& s : c.segments) {
    Json cps = Json::array();
    for (const auto& p : s.path.control_points()) cps.push_back(detail::point_json(p));
    segments.push_back({{"id", s.id},
                        {"from", ref(s.from)},
                        {"to", ref(s.to)},
                        {"diameter", s.path.diameter()},
                        {"control_points", cps}});
  }
  Json doc = {{"meta", meta}, {"ports", ports}, {"nodes", nodes}, {"segments", segments}};
  if (c.kernels) doc["kernels"] = kernels_to_json(*c.kernels);
  return doc;
}

inline Circuit circuit_from_json(const Json& doc) {
  try {
    Circuit c;
    const Json& meta = doc.at("meta");
    if (meta.contains("format_version") && meta.at("format_version").get<int>() > kNetlistFormatVersion) {
      throw IoError("netlist format version is newer than this reader");
    }
    if (meta.contains("units")) {
      const Json& u = meta.at("units");
      if (u.value("length", "um") != "um" || u.value("loss", "dB") != "dB") {
        throw IoError("netlist units must be um and dB");
      }
    }
    c.meta.name = meta.value("name", "");
    c.meta.generator = meta.value("generator", "");
    if (meta.contains("params")) c.meta.params = meta.at("params").get<std::map<std::string, double>>();

    std::map<std::string, std::size_t> port_index;
    for (const auto& p : doc.at("ports")) {
      const std::string role = p.at("role").get<std::string>();
      if (role != "input" && role != "output") throw IoError("unknown port role '" + role + "'");
      const auto gi = p.at("grid_index").get<std::array<int, 2>>();
      Port port{p.at("id").get<std::string>(), {gi[0], gi[1]}, detail::point_from(p.at("position")),
                role == "input" ? PortRole::Input : PortRole::Output};
      if (!port_index.emplace(port.id, c.ports.size()).second) throw IoError("duplicate port id " + port.id);
      c.ports.push_back(std::move(port));
    }
    std::map<std::string, std::size_t> node_index;
    for (const auto& n : doc.at("nodes")) {
      BifurcationNode node{n.at("id").get<std::string>(), detail::point_from(n.at("position")),
                           n.at("layer").get<int>(), {}};
      if (!node_index.emplace(node.id, c.nodes.size()).second) throw IoError("duplicate node id " + node.id);
      c.nodes.push_back(std::move(node));
    }
    auto resolve = [&](const Json& r) {
      const std::string kind = r.at("kind").get<std::string>();
      const std::string id = r.at("id").get<std::string>();
      if (kind != "port" && kind != "node") throw IoError("unknown endpoint kind '" + kind + "'");
      const auto& index = kind == "port" ? port_index : node_index;
      const auto it = index.find(id);
      if (it == index.end()) throw IoError("segment references unknown " + kind + " '" + id + "'");
      return kind == "port" ? Endpoint::port(it->second) : Endpoint::node(it->second);
    };
    for (const auto& s : doc.at("segments")) {
      std::vector<Point3> cps;
      for (const auto& p : s.at("control_points")) cps.push_back(detail::point_from(p));
      Segment seg{s.at("id").get<std::string>(), WaveguidePath(std::move(cps), s.at("diameter").get<double>()),
                  resolve(s.at("from")), resolve(s.at("to"))};
      if (seg.from.kind == Endpoint::Kind::Node) c.nodes[seg.from.index].children.push_back(c.segments.size());
      c.segments.push_back(std::move(seg));
    }
    if (doc.contains("kernels")) c.kernels = kernels_from_json(doc.at("kernels"));
    return c;
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed netlist: ") + e.what());
  }
}

inline std::string netlist_string(const Circuit& c) { return circuit_to_json(c).dump(2) + "\n"; }

inline void export_netlist(const Circuit& c, const std::filesystem::path& path) {
  atomic_write(path, netlist_string(c));
}

inline Circuit import_netlist(const std::filesystem::path& path) {
  return circuit_from_json(parse_json(read_file(path), path.string()));
}

inline Json report_to_json(const ValidationReport& r) {
  Json violations = Json::array();
  for (const auto& v : r.clearance_violations) {
    violations.push_back({{"segments", {v.segment_a, v.segment_b}},
                          {"distance_um", v.distance},
                          {"location", detail::point_json(v.location)}});
  }
  Json bends = Json::array();
  for (const auto& b : r.bend_violations) bends.push_back({{"segment", b.segment}, {"radius_um", b.radius}});
  return {{"pass", r.pass},
          {"clearance_violations", violations},
          {"bend_violations", bends},
          {"min_bend_radius_um", detail::finite_or_null(r.min_bend_radius_found)},
          {"max_aspect_ratio", r.max_aspect_ratio},
          {"warnings", r.warnings}};
}

inline Json power_map_to_json(const PowerMap& m) {
  return {{"units", {{"power", "linear"}}}, {"powers", m}};
}

inline std::string power_map_csv(const PowerMap& m) {
  std::ostringstream os;
  os.precision(17);
  os << "port,power\n";
  for (const auto& [id, p] : m) os << id << ',' << p << '\n';
  return os.str();
}

inline Json feature_map_to_json(const FeatureMap& fm) {
  Json values = Json::array();
  for (int f = 0; f < fm.filters; ++f) {
    Json plane = Json::array();
    for (int u = 0; u < fm.units_u; ++u) {
      Json row = Json::array();
      for (int v = 0; v < fm.units_v; ++v) row.push_back(fm.at(f, u, v));
      plane.push_back(row);
    }
    values.push_back(plane);
  }
  return {{"filters", fm.filters}, {"units_u", fm.units_u}, {"units_v", fm.units_v}, {"values", values}};
}

inline std::string feature_map_csv(const FeatureMap& fm) {
  std::ostringstream os;
  os.precision(17);
  os << "filter,u,v,power\n";
  for (int f = 0; f < fm.filters; ++f) {
    for (int u = 0; u < fm.units_u; ++u) {
      for (int v = 0; v < fm.units_v; ++v) os << 'F' << f + 1 << ',' << u << ',' << v << ',' << fm.at(f, u, v) << '\n';
    }
  }
  return os.str();
}

}  // namespace waveroute
