// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "waveroute/waveroute.hpp"

namespace {

using namespace waveroute;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Accumulates checks; the first failure message is kept as the detail.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && out_.pass) out_.detail = what;
    out_.pass = out_.pass && ok;
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome done() const { return out_; }

 private:
  Outcome out_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

FractalSpec layers(int l) {
  FractalSpec s;
  s.layers = l;
  return s;
}

double loss_db(const Circuit& c, const LossModel& lm) {
  const PowerMap in = drive_all_inputs(c);
  return linear_to_db(total_power(propagate_power(c, in, lm)) / injected_power(c, in));
}

KernelSet optimized_kernels() {
  KernelSet ks = default_kernel_set();
  const auto r = optimize_port_assignment(ks);
  std::copy(r.permutation.begin(), r.permutation.end(), ks.assignment.begin());
  return ks;
}

Outcome loss_calibration() {
  Check ck;
  const auto t0 = Clock::now();
  const auto r = calibrate_losses(5.52, 7.80, 10.61);
  const double elapsed = ms_since(t0);
  ck.expect(std::abs(r.model.injection_db - 2.71) <= 0.01, fmt("I = %.4f", r.model.injection_db));
  ck.expect(std::abs(r.model.propagation_db - 1.14) <= 0.01, fmt("P = %.4f", r.model.propagation_db));
  ck.expect(std::abs(r.model.coupling_db - 1.67) <= 0.01, fmt("C = %.4f", r.model.coupling_db));
  const auto back = predict_calibration_losses(r.model);
  const double err = std::max({std::abs(back[0] - 5.52), std::abs(back[1] - 7.80), std::abs(back[2] - 10.61)});
  ck.expect(err <= 1e-12, fmt("re-prediction error %.3e", err));
  ck.expect(elapsed < 1.0, fmt("calibration took %.3f ms", elapsed));
  ck.note(fmt("I=%.4f P=%.4f C=%.4f dB, re-prediction error %.1e", r.model.injection_db, r.model.propagation_db,
              r.model.coupling_db, err));
  return ck.done();
}

Outcome end_to_end_loss() {
  Check ck;
  const auto lm = calibrate_losses(5.52, 7.80, 10.61).model;
  const auto c1 = generate_coupler(layers(1));
  const auto c2 = generate_coupler(layers(2));
  const auto t0 = Clock::now();
  const double l1 = loss_db(c1, lm);
  const double l2 = loss_db(c2, lm);
  const double elapsed = ms_since(t0);
  ck.expect(std::abs(l1 - 5.52) <= 0.05, fmt("1x9 loss %.4f dB", l1));
  ck.expect(std::abs(l2 - 10.61) <= 0.05, fmt("1x81 loss %.4f dB", l2));
  ck.expect(elapsed < 1000.0, fmt("simulation took %.1f ms", elapsed));
  ck.note(fmt("1x9 %.4f dB, 1x81 %.4f dB", l1, l2));
  return ck.done();
}

Outcome mode_counts() {
  Check ck;
  const double thick = mode_count(1.2, 0.5, 0.635);
  const double thin = mode_count(0.3, 0.5, 0.635);
  ck.expect(std::abs(thick - 4.41) <= 0.01, fmt("M(1.2) = %.4f", thick));
  ck.expect(thin < 1.0, fmt("M(0.3) = %.4f", thin));
  ck.note(fmt("M(1.2 um) = %.4f, M(0.3 um) = %.4f", thick, thin));
  return ck.done();
}

Outcome array_combinatorics() {
  Check ck;
  struct Case {
    int layers;
    int n;
    std::size_t ni;
    std::size_t no;
  };
  double slowest = 0.0;
  double side = 0.0;
  for (const auto& cs : {Case{1, 9, 81, 121}, Case{2, 3, 9, 121}, Case{2, 15, 225, 529}}) {
    const auto t0 = Clock::now();
    const auto c = generate_coupler_array(layers(cs.layers), cs.n, cs.n);
    slowest = std::max(slowest, ms_since(t0));
    const std::size_t ni = c.count(PortRole::Input);
    const std::size_t no = c.count(PortRole::Output);
    ck.expect(ni == cs.ni && no == cs.no,
              fmt("L=%.0f %.0fx%.0f gave " , cs.layers, cs.n, cs.n) + std::to_string(ni) + "/" + std::to_string(no));
    if (cs.ni == 225) {
      double lo = 1e300;
      double hi = -1e300;
      for (const auto& p : c.ports) {
        if (p.role != PortRole::Output) continue;
        lo = std::min(lo, p.position.x);
        hi = std::max(hi, p.position.x);
      }
      side = hi - lo + FractalSpec{}.d0;
      ck.expect(side == 460.0, fmt("output-plane side %.6f um", side));
    }
  }
  ck.expect(slowest < 10000.0, fmt("largest array took %.1f ms", slowest));
  ck.note(fmt("(81,121) (9,121) (225,529); side %.1f um; slowest %.1f ms", side, slowest));
  return ck.done();
}

Outcome collision_freeness() {
  Check ck;
  std::vector<std::pair<std::string, Circuit>> structures;
  structures.emplace_back("1x9", generate_coupler(layers(1)));
  structures.emplace_back("1x81", generate_coupler(layers(2)));
  for (int n : {3, 9, 15}) {
    structures.emplace_back("L1 " + std::to_string(n) + "x" + std::to_string(n),
                            generate_coupler_array(layers(1), n, n));
  }
  for (int n : {3, 15}) {
    structures.emplace_back("L2 " + std::to_string(n) + "x" + std::to_string(n),
                            generate_coupler_array(layers(2), n, n));
  }
  FilterUnitOptions unchecked;
  unchecked.validate = false;
  structures.emplace_back("Haar unit", generate_filter_unit(default_kernel_set(), unchecked));
  std::size_t segments = 0;
  for (const auto& [name, c] : structures) {
    const auto v = check_clearance(c, 0.5);
    segments += c.segments.size();
    ck.expect(v.empty(), name + ": " + std::to_string(v.size()) + " clearance violations");
  }

  // Plant a short waveguide beside a random existing one; it must be reported.
  std::mt19937 rng(4242);
  int planted = 0;
  int detected = 0;
  for (const auto* base : {&structures[3].second, &structures[5].second, &structures.back().second}) {
    for (int trial = 0; trial < 20; ++trial) {
      Circuit c = *base;
      const std::size_t target = rng() % c.segments.size();
      const auto pts = sample_path(c.segments[target].path, 0.25);
      if (pts.size() < 20) continue;
      const std::size_t k = pts.size() / 2;
      const Vec3 t = normalized(pts[k + 1] - pts[k - 1]);
      const Vec3 side = normalized(cross(t, std::abs(t.z) < 0.9 ? kAxisZ : kAxisX));
      const double gap = 0.3 + 1.3 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const Point3 a = pts[k - 4] + gap * side;
      const Point3 b = pts[k + 4] + gap * side;
      c.nodes.push_back({"plant_a", a, 99, {}});
      c.nodes.push_back({"plant_b", b, 99, {}});
      c.segments.push_back({"planted", WaveguidePath({a, a + (b - a) / 3.0, a + 2.0 * (b - a) / 3.0, b}),
                            Endpoint::node(c.nodes.size() - 2), Endpoint::node(c.nodes.size() - 1)});
      ++planted;
      for (const auto& x : check_clearance(c, 0.5)) {
        if ((x.segment_a == "planted" && x.segment_b == c.segments[target].id) ||
            (x.segment_b == "planted" && x.segment_a == c.segments[target].id)) {
          ++detected;
          break;
        }
      }
    }
  }
  ck.expect(planted > 0 && detected == planted,
            "plant-and-detect " + std::to_string(detected) + "/" + std::to_string(planted));
  ck.note(std::to_string(structures.size()) + " structures, " + std::to_string(segments) +
          " segments clean; plant-and-detect " + std::to_string(detected) + "/" + std::to_string(planted));
  return ck.done();
}

Outcome haar_assignment() {
  Check ck;
  const KernelSet ks = default_kernel_set();
  ck.expect(connection_count(ks) == 37, "connections " + std::to_string(connection_count(ks)));
  ck.expect(assignment_space_size(9) == 362880u, "assignment space " + std::to_string(assignment_space_size(9)));
  const auto t0 = Clock::now();
  const auto r = optimize_port_assignment(ks);
  const double elapsed = ms_since(t0);

  // Re-enumeration oracle from raw geometry.
  const HaarGeometry g;
  double table[9][9];
  for (int f = 0; f < 9; ++f) {
    for (int pos = 0; pos < 9; ++pos) {
      double s = 0.0;
      for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) {
          if (!ks.kernels[static_cast<std::size_t>(f)].weights[p][q]) continue;
          s += std::hypot((p - pos / 3) * g.d0, (q - pos % 3) * g.d0, g.height);
        }
      }
      table[f][pos] = s;
    }
  }
  std::vector<int> perm(9);
  for (int i = 0; i < 9; ++i) perm[static_cast<std::size_t>(i)] = i;
  double best = 1e300;
  std::size_t count = 0;
  do {
    double s = 0.0;
    for (int f = 0; f < 9; ++f) s += table[f][perm[static_cast<std::size_t>(f)]];
    best = std::min(best, s);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  double chosen = 0.0;
  for (int f = 0; f < 9; ++f) chosen += table[f][r.permutation[static_cast<std::size_t>(f)]];
  ck.expect(count == 362880u, "oracle enumerated " + std::to_string(count));
  ck.expect(std::abs(chosen - best) <= 1e-9 * best, fmt("optimizer %.6f vs oracle %.6f", chosen, best));
  ck.expect(std::abs(r.cost - chosen) <= 1e-9 * best, fmt("reported cost %.6f vs recomputed %.6f", r.cost, chosen));
  ck.expect(elapsed < 5000.0, fmt("optimizer took %.1f ms", elapsed));
  std::string p;
  for (int v : r.permutation) p += std::to_string(v);
  ck.note(fmt("37 connections, 9! = 362880, min cost %.4f um in %.1f ms, permutation ", best, elapsed) + p);
  return ck.done();
}

Outcome convolution_equivalence() {
  Check ck;
  const KernelSet ks = optimized_kernels();
  const auto c = tile_filter_array(ks, 21);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  bool shape = true;
  for (int trial = 0; trial < 100; ++trial) {
    Image img{21, 21, std::vector<double>(441)};
    for (double& px : img.pixels) px = u(rng);
    const auto fm = haar_convolve(c, img, LossModel::lossless());
    shape = shape && fm.filters == 9 && fm.units_u == 7 && fm.units_v == 7 && fm.values.size() == 441;
    for (int f = 0; f < 9; ++f) {
      for (int a = 0; a < 7; ++a) {
        for (int b = 0; b < 7; ++b) {
          double s = 0.0;
          for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) {
              if (ks.kernels[static_cast<std::size_t>(f)].weights[p][q]) s += img.at(3 * a + p, 3 * b + q);
            }
          }
          const double rel = std::abs(fm.at(f, a, b) - s) / std::max(s, 1e-300);
          worst = std::max(worst, s == 0.0 ? std::abs(fm.at(f, a, b)) : rel);
        }
      }
    }
  }
  ck.expect(shape, "feature map shape is not 9 x 7 x 7");
  ck.expect(worst <= 1e-12, fmt("worst relative error %.3e", worst));
  ck.note(fmt("100 images, 49 units x 9 filters, worst relative error %.2e", worst));
  return ck.done();
}

Outcome reverse_characterization() {
  Check ck;
  const KernelSet ks = default_kernel_set();
  const auto unit = generate_filter_unit(ks);
  int exact = 0;
  for (std::size_t f = 0; f < kFilterCount; ++f) {
    const auto in = reverse_characterize(unit, "out_F" + std::to_string(f + 1));
    bool match = true;
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) {
        match = match && ((in.at("in_" + std::to_string(p) + "_" + std::to_string(q)) > 0.0) ==
                          ks.kernels[f].weights[p][q]);
      }
    }
    exact += match ? 1 : 0;
    ck.expect(match, "F" + std::to_string(f + 1) + " support differs from its kernel");
  }
  const auto lm = calibrate_losses(5.52, 7.80, 10.61).model;
  double worst = 0.0;
  for (const Circuit& c : {unit, tile_filter_array(ks, 21)}) {
    const auto fwd = forward_matrix(c, lm);
    const auto rev = reverse_matrix_transposed(c, lm);
    ck.expect(fwd.rows == rev.rows && fwd.cols == rev.cols, "matrix labels differ");
    for (std::size_t i = 0; i < fwd.values.size(); ++i) {
      worst = std::max(worst, std::abs(fwd.values[i] - rev.values[i]) / std::max(1.0, std::abs(fwd.values[i])));
    }
  }
  ck.expect(worst <= 1e-12, fmt("transpose mismatch %.3e", worst));
  ck.note(std::to_string(exact) + "/9 supports exact; forward vs reverse transpose max error " + fmt("%.1e", worst));
  return ck.done();
}

Outcome splitting_statistics() {
  Check ck;
  const auto c1 = generate_coupler(layers(1));
  const auto c2 = generate_coupler(layers(2));
  const auto lossless = LossModel::lossless();
  const double f1 = splitting_histogram(propagate_power(c1, drive_all_inputs(c1), lossless), c1).central_fraction;
  const double f2 = splitting_histogram(propagate_power(c2, drive_all_inputs(c2), lossless), c2).central_fraction;
  ck.expect(std::abs(f1 - 0.42) <= 1e-9 && compare_central_fraction(f1, 1).within_band, fmt("1x9 central %.4f", f1));
  const auto cmp = compare_central_fraction(f2, 2);
  ck.expect(std::abs(f2 - 0.1764) <= 1e-9, fmt("1x81 central %.4f", f2));
  ck.expect(!cmp.within_band && cmp.note.find("model limitation") != std::string::npos,
            "cascade deviation is not flagged");

  // Per-layer override: same conservation invariants as the default model.
  const SplitModel fit{{0.42, 0.33 / 0.42}};
  const auto in = drive_all_inputs(c2);
  const auto out = propagate_power(c2, in, lossless, fit);
  const double fo = splitting_histogram(out, c2).central_fraction;
  bool nonneg = true;
  for (const auto& [id, v] : out) nonneg = nonneg && v >= 0.0;
  const double lossy = total_power(propagate_power(c2, in, calibrate_losses(5.52, 7.80, 10.61).model, fit));
  ck.expect(std::abs(fo - 0.33) <= 1e-9, fmt("override central %.4f", fo));
  ck.expect(std::abs(total_power(out) - injected_power(c2, in)) <= 1e-12, "override does not conserve power");
  ck.expect(nonneg && lossy <= injected_power(c2, in), "override breaks sub-conservation");
  ck.note(fmt("1x9 %.4f; 1x81 cascade %.4f flagged vs 0.33+-0.06; override %.4f conserves power", f1, f2, fo));
  return ck.done();
}

Outcome scaling_slopes() {
  Check ck;
  std::vector<std::int64_t> ns;
  for (std::int64_t n = 16; n <= 4096; n *= 2) ns.push_back(n);
  const auto r = scaling_report(20.0, ns);
  ck.expect(r.slope_2d && std::abs(*r.slope_2d - 2.0) <= 0.01, fmt("2D slope %.4f", r.slope_2d.value_or(NAN)));
  ck.expect(r.slope_3d && std::abs(*r.slope_3d - 1.0) <= 0.01, fmt("3D slope %.4f", r.slope_3d.value_or(NAN)));
  ck.note(fmt("2D slope %.4f, 3D slope %.4f over N = 16..4096", r.slope_2d.value_or(NAN), r.slope_3d.value_or(NAN)));
  return ck.done();
}

Outcome round_trips() {
  Check ck;
  auto build = [] {
    std::vector<Circuit> v;
    v.push_back(generate_coupler(layers(1)));
    v.push_back(generate_coupler(layers(2)));
    v.push_back(generate_coupler_array(layers(1), 9, 9));
    v.push_back(generate_coupler_array(layers(2), 3, 3));
    v.push_back(generate_coupler_array(layers(2), 15, 15));
    v.push_back(generate_filter_unit(default_kernel_set()));
    v.push_back(tile_filter_array(optimized_kernels(), 21));
    return v;
  };
  const auto first = build();
  const auto second = build();
  std::size_t identical = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const std::string text = netlist_string(first[i]);
    const Circuit back = circuit_from_json(parse_json(text, "netlist"));
    const bool same = back == first[i] && netlist_string(back) == text;
    ck.expect(same, "round trip changed " + first[i].meta.name);
    const bool bytes = text == netlist_string(second[i]) &&
                       stl_bytes(circuit_mesh(first[i])) == stl_bytes(circuit_mesh(second[i])) &&
                       toolpath_string(first[i]) == toolpath_string(second[i]);
    ck.expect(bytes, "exports of " + first[i].meta.name + " differ between runs");
    identical += same && bytes ? 1 : 0;
  }
  ck.note(std::to_string(identical) + "/" + std::to_string(first.size()) +
          " circuits round-trip exactly; netlist, STL and toolpath bytes repeat");
  return ck.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 loss calibration", loss_calibration},
      {"2 end-to-end loss", end_to_end_loss},
      {"3 mode count", mode_counts},
      {"4 array combinatorics", array_combinatorics},
      {"5 collision-freeness", collision_freeness},
      {"6 Haar connections and assignment", haar_assignment},
      {"7 convolution equivalence", convolution_equivalence},
      {"8 reverse characterization", reverse_characterization},
      {"9 splitting statistics", splitting_statistics},
      {"10 scaling slopes", scaling_slopes},
      {"11 round trips", round_trips},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = ms_since(t0);
    std::printf("[%s] criterion %s: %s (%.0f ms)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                elapsed);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
