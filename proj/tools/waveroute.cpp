// SPDX-FileCopyrightText: © 2026 The waveroute Authors
//
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: generate, validate, simulate, calibrate, convolve,
// scale and export.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "waveroute/waveroute.hpp"

namespace wr = waveroute;
namespace fs = std::filesystem;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailedCheck = 2;
constexpr int kError = 1;

void emit(const std::string& out, const std::string& data) {
  if (out.empty() || out == "-") {
    std::cout << data;
  } else {
    wr::atomic_write(out, data);
  }
}

bool wants_csv(const std::string& out) { return fs::path(out).extension() == ".csv"; }

wr::LossModel parse_loss(const std::vector<double>& v) {
  if (v.empty()) return wr::LossModel::lossless();
  if (v.size() != 3) throw wr::ParameterError("--loss expects I,P,C");
  wr::LossModel lm;
  lm.injection_db = v[0];
  lm.propagation_db = v[1];
  lm.coupling_db = v[2];
  return lm;
}

wr::SplitModel parse_split(const std::vector<double>& v) {
  wr::SplitModel sm;
  if (!v.empty()) sm.central_fraction = v;
  return sm;
}

wr::Chirality parse_chirality(const std::string& s) {
  if (s == "left") return wr::Chirality::Left;
  if (s == "right") return wr::Chirality::Right;
  throw wr::ParameterError("chirality must be left or right");
}

std::pair<int, int> parse_grid(const std::string& s) {
  const auto x = s.find_first_of("x,");
  try {
    if (x == std::string::npos) {
      const int n = std::stoi(s);
      return {n, n};
    }
    return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
  } catch (const std::exception&) {
    throw wr::ParameterError("--grid expects N or NxM, got '" + s + "'");
  }
}

wr::Image read_image(const std::string& path) {
  const std::string text = wr::read_file(path);
  wr::Image img;
  if (fs::path(path).extension() == ".json") {
    const auto j = wr::parse_json(text, path);
    const auto rows = j.get<std::vector<std::vector<double>>>();
    img.rows = static_cast<int>(rows.size());
    img.cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != img.cols) throw wr::ParameterError("image rows differ in length");
      img.pixels.insert(img.pixels.end(), r.begin(), r.end());
    }
    return img;
  }
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        img.pixels.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw wr::ParameterError("image cell '" + cell + "' is not a number");
      }
      ++cols;
    }
    if (img.rows > 0 && cols != img.cols) throw wr::ParameterError("image rows differ in length");
    img.cols = cols;
    ++img.rows;
  }
  return img;
}

// Values from a --config JSON object become option defaults, so explicit
// flags still win. Keys are option long names without dashes.
void apply_config(CLI::App& app, const wr::Json& cfg) {
  for (CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
    if (name.empty() || name == "config" || name == "help" || !cfg.contains(name)) continue;
    const wr::Json& v = cfg.at(name);
    std::string text;
    if (v.is_string()) {
      text = v.get<std::string>();
    } else if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) text += (i ? "," : "") + v[i].dump();
    } else if (v.is_boolean()) {
      text = v.get<bool>() ? "true" : "false";
    } else {
      text = v.dump();
    }
    opt->default_str(text);
    if (opt->get_type_size() != 0) opt->default_val(text);
  }
  for (CLI::App* sub : app.get_subcommands({})) apply_config(*sub, cfg);
}

std::string find_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  }
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

std::string format_db(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"waveroute: 3D photonic waveguide interconnect compiler"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with option defaults")->check(CLI::ExistingFile);

  // generate fractal | haar
  auto* gen = app.add_subcommand("generate", "Generate a circuit netlist");
  gen->require_subcommand(1);

  auto* frac = gen->add_subcommand("fractal", "Fractal fan-out coupler or coupler array");
  int b = 9;
  int layers = 1;
  double pitch = 20.0;
  std::string grid = "1";
  double input_pitch = 0.0;
  double height_factor = 4.0;
  std::string chirality = "left";
  double twist = 12.0;
  double diameter = wr::kDefaultDiameter;
  std::string out;
  frac->add_option("--b", b, "Branching ratio (perfect square)")->capture_default_str();
  frac->add_option("--layers", layers, "Bifurcation layers L")->capture_default_str();
  frac->add_option("--pitch", pitch, "Output pitch D0 in um")->capture_default_str();
  frac->add_option("--grid", grid, "Input grid N or NxM")->capture_default_str();
  frac->add_option("--input-pitch", input_pitch, "Input pitch in um (default D0)");
  frac->add_option("--height-factor", height_factor, "H_L = k * D0")->capture_default_str();
  frac->add_option("--chirality", chirality, "left or right")->capture_default_str();
  frac->add_option("--twist", twist, "Branch swirl in degrees")->capture_default_str();
  frac->add_option("--diameter", diameter, "Waveguide diameter in um")->capture_default_str();
  frac->add_option("-o,--out", out, "Output netlist (default stdout)");

  auto* haar = gen->add_subcommand("haar", "Haar filter unit or stride-3 filter array");
  std::string kernels_path;
  double haar_height = 80.0;
  int image_side = 3;
  bool optimize = false;
  haar->add_option("--kernels", kernels_path, "Kernel set JSON")->check(CLI::ExistingFile);
  haar->add_option("--pitch", pitch, "Port pitch D0 in um")->capture_default_str();
  haar->add_option("--height", haar_height, "Unit height in um")->capture_default_str();
  haar->add_option("--image-side", image_side, "Image side in pixels (multiple of 3)")->capture_default_str();
  haar->add_flag("--optimize", optimize, "Replace the assignment with the exhaustive optimum");
  haar->add_option("--chirality", chirality, "left or right")->capture_default_str();
  haar->add_option("--twist", twist, "Connection swirl in degrees")->capture_default_str();
  haar->add_option("-o,--out", out, "Output netlist (default stdout)");

  // validate
  auto* val = app.add_subcommand("validate", "Check clearance, bend radius and aspect ratio");
  std::string netlist;
  double clearance = wr::kDefaultClearance;
  double min_bend = wr::kDefaultMinBendRadius;
  double sample_pitch = wr::kDefaultSamplePitch;
  val->add_option("netlist", netlist, "Netlist JSON")->required()->check(CLI::ExistingFile);
  val->add_option("--clearance", clearance, "Minimum surface clearance in um")->capture_default_str();
  val->add_option("--min-bend-radius", min_bend, "Minimum bend radius in um")->capture_default_str();
  val->add_option("--sample-pitch", sample_pitch, "Sampling pitch in um")->capture_default_str();
  val->add_option("-o,--out", out, "Report JSON (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Incoherent power flow");
  std::vector<double> loss;
  std::vector<double> split;
  std::string reverse_port;
  sim->add_option("netlist", netlist, "Netlist JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--loss", loss, "I,P,C in dB (default lossless)")->delimiter(',');
  sim->add_option("--split", split, "Central split fraction per layer")->delimiter(',');
  sim->add_option("--reverse", reverse_port, "Drive this output port and read the inputs");
  sim->add_option("-o,--out", out, "Power map, .json or .csv (default stdout JSON)");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Separate I, P, C from three loss measurements");
  std::vector<double> measured;
  cal->add_option("losses", measured, "L_1x9 L_1x9_triple L_1x81 in dB")->required()->expected(3);
  cal->add_option("-o,--out", out, "Result JSON (default stdout)");

  // convolve
  auto* conv = app.add_subcommand("convolve", "Run an image through a Haar filter array");
  std::string image_path;
  conv->add_option("netlist", netlist, "Filter array netlist JSON")->required()->check(CLI::ExistingFile);
  conv->add_option("--image", image_path, "Image as CSV rows or a JSON 2D array")
      ->required()
      ->check(CLI::ExistingFile);
  conv->add_option("--loss", loss, "I,P,C in dB (default lossless)")->delimiter(',');
  conv->add_option("--split", split, "Central split fraction per layer")->delimiter(',');
  conv->add_option("-o,--out", out, "Feature map, .json or .csv (default stdout JSON)");

  // scale
  auto* scale = app.add_subcommand("scale", "2D crossbar versus 3D volumetric footprint");
  std::vector<std::int64_t> ns{16, 64, 256, 1024, 4096};
  scale->add_option("--pitch", pitch, "Port pitch in um")->capture_default_str();
  scale->add_option("--n", ns, "Channel counts N")->delimiter(',');
  scale->add_option("-o,--out", out, "CSV report (default stdout)");

  // export
  auto* exp = app.add_subcommand("export", "Write a netlist as netlist, mesh or toolpath");
  std::string format = "netlist";
  int sides = wr::kDefaultMeshSides;
  double export_pitch = 0.0;
  exp->add_option("netlist", netlist, "Netlist JSON")->required()->check(CLI::ExistingFile);
  exp->add_option("--format", format, "netlist, mesh or toolpath")
      ->check(CLI::IsMember({"netlist", "mesh", "toolpath"}))
      ->capture_default_str();
  exp->add_option("--sides", sides, "Facets per tube ring")->capture_default_str();
  exp->add_option("--sample-pitch", export_pitch, "Sampling pitch in um (mesh 1.0, toolpath 0.5)");
  exp->add_option("-o,--out", out, "Output file")->required();

  try {
    if (const std::string cfg = find_config(argc, argv); !cfg.empty()) {
      apply_config(app, wr::parse_json(wr::read_file(cfg), cfg));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every usage error maps to kError.
    return app.exit(e) == 0 ? 0 : kError;
  }

  try {
    if (frac->parsed()) {
      wr::FractalSpec spec;
      spec.b = b;
      spec.layers = layers;
      spec.d0 = pitch;
      spec.height_factor = height_factor;
      spec.chirality = parse_chirality(chirality);
      spec.twist_deg = twist;
      spec.diameter = diameter;
      const auto [n, m] = parse_grid(grid);
      const wr::Circuit c = (n == 1 && m == 1 && input_pitch == 0.0)
                                ? wr::generate_coupler(spec)
                                : wr::generate_coupler_array(spec, n, m, input_pitch);
      emit(out, wr::netlist_string(c));
      return kOk;
    }
    if (haar->parsed()) {
      wr::KernelSet ks = wr::default_kernel_set();
      if (!kernels_path.empty()) {
        ks = wr::kernels_from_json(wr::parse_json(wr::read_file(kernels_path), kernels_path));
      }
      wr::FilterUnitOptions o;
      o.geometry = {pitch, haar_height};
      o.chirality = parse_chirality(chirality);
      o.twist_deg = twist;
      if (optimize) {
        const auto best = wr::optimize_port_assignment(ks, o.geometry);
        for (std::size_t f = 0; f < wr::kFilterCount; ++f) ks.assignment[f] = best.permutation[f];
        std::cerr << "assignment cost " << best.cost << " um\n";
      }
      const wr::Circuit c = image_side == 3 ? wr::generate_filter_unit(ks, o)
                                            : wr::tile_filter_array(ks, image_side, o);
      emit(out, wr::netlist_string(c));
      return kOk;
    }
    if (val->parsed()) {
      const wr::Circuit c = wr::import_netlist(netlist);
      wr::check_structure(c);
      const auto report = wr::validate(c, {clearance, min_bend, sample_pitch});
      emit(out, wr::report_to_json(report).dump(2) + "\n");
      std::cerr << (report.pass ? "PASS" : "FAIL") << ": " << report.clearance_violations.size()
                << " clearance and " << report.bend_violations.size() << " bend violations\n";
      return report.pass ? kOk : kFailedCheck;
    }
    if (sim->parsed()) {
      const wr::Circuit c = wr::import_netlist(netlist);
      const auto lm = parse_loss(loss);
      const auto sm = parse_split(split);
      wr::PowerMap result;
      if (!reverse_port.empty()) {
        result = wr::reverse_characterize(c, reverse_port, lm, sm);
      } else {
        const auto drive = wr::drive_all_inputs(c);
        result = wr::propagate_power(c, drive, lm, sm);
        const double injected = wr::injected_power(c, drive);
        const double total = wr::total_power(result);
        std::cerr << "total loss " << format_db(wr::linear_to_db(total / injected)) << " dB\n";
        if (c.meta.generator == "fractal" && c.count(wr::PortRole::Input) == 1) {
          const auto h = wr::splitting_histogram(wr::propagate_power(c, drive, wr::LossModel::lossless(), sm), c);
          const auto cmp = wr::compare_central_fraction(h.central_fraction, static_cast<int>(c.meta.params.at("layers")));
          std::cerr << "central fraction " << h.central_fraction;
          if (cmp.measured) std::cerr << " (measured " << cmp.measured->central << " +/- " << cmp.measured->tolerance << ")";
          std::cerr << '\n';
          if (!cmp.note.empty()) std::cerr << "note: " << cmp.note << '\n';
        }
      }
      emit(out, wants_csv(out) ? wr::power_map_csv(result) : wr::power_map_to_json(result).dump(2) + "\n");
      return kOk;
    }
    if (cal->parsed()) {
      const auto r = wr::calibrate_losses(measured[0], measured[1], measured[2]);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      const wr::Json j = {{"units", "dB"},
                          {"I", r.model.injection_db},
                          {"P", r.model.propagation_db},
                          {"C", r.model.coupling_db},
                          {"warnings", r.warnings}};
      emit(out, j.dump(2) + "\n");
      return kOk;
    }
    if (conv->parsed()) {
      const wr::Circuit c = wr::import_netlist(netlist);
      const auto fm = wr::haar_convolve(c, read_image(image_path), parse_loss(loss), parse_split(split));
      emit(out, wants_csv(out) ? wr::feature_map_csv(fm) : wr::feature_map_to_json(fm).dump(2) + "\n");
      return kOk;
    }
    if (scale->parsed()) {
      const auto rep = wr::scaling_report(pitch, ns);
      emit(out, rep.csv());
      if (rep.slope_2d) std::cerr << "log-log slope 2D " << *rep.slope_2d << ", 3D " << *rep.slope_3d << '\n';
      return kOk;
    }
    if (exp->parsed()) {
      const wr::Circuit c = wr::import_netlist(netlist);
      if (format == "netlist") {
        wr::export_netlist(c, out);
      } else if (format == "mesh") {
        wr::export_mesh(c, out, sides, export_pitch > 0.0 ? export_pitch : wr::kDefaultMeshPitch);
      } else {
        wr::export_toolpath(c, out, export_pitch > 0.0 ? export_pitch : wr::kDefaultToolpathPitch);
      }
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
