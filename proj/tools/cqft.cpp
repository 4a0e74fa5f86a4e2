// cqft: pair production in combined Sauter wells.
//
//   cqft simulate [--config FILE] [--Vs 2.1 --omega 1.5 ...] [--out DIR]
//   cqft sweep    --axis Vs=0:3:0.03 [--axis omega=0.02:3.5:0.02] [--csv FILE]
//   cqft spectrum --depths 0:3:0.05 [--critical] [--csv FILE]
//
// Energies are given in units of c^2, D and W in units of 1/c.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqft/config.hpp"
#include "cqft/error.hpp"
#include "cqft/observables.hpp"
#include "cqft/spectrum.hpp"
#include "cqft/sweep.hpp"

namespace fs = std::filesystem;
using namespace cqft;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerics = 3;

struct CommonOptions {
  std::string config_file;
  bool fast = false;
  std::map<std::string, std::string> overrides;
};

const std::map<std::string, std::string> kKeyHelp = {
    {"c", "speed of light (a.u.)"},
    {"L", "box length (a.u.)"},
    {"Nz", "grid points (even, >= 8)"},
    {"dt", "time step (a.u.)"},
    {"T", "switch-off time (a.u.)"},
    {"midpoint", "sample V at step midpoints (true/false)"},
    {"Vs", "static depth (c^2)"},
    {"Vo", "oscillating depth (c^2)"},
    {"omega", "angular frequency (c^2)"},
    {"D", "well width (1/c)"},
    {"W", "edge width (1/c)"},
    {"shape", "well | step"},
    {"sign", "as_printed | negated"},
    {"mode", "combined | static_only | oscillating_only (simulate)"},
    {"snapshots", "N(t) intervals over [0, T]"},
    {"cutoff", "mode energy cutoff (c^2), 0 = off"},
    {"workers", "worker threads, 0 = CQFT_WORKERS or all cores"},
    {"output_dir", "directory for output files"},
};

void add_common(CLI::App* app, CommonOptions& common) {
  app->add_option("--config", common.config_file, "key = value config file; flags override it");
  app->add_flag("--fast", common.fast, "coarse preset: N_z = 128, dt = 2e-7");
  for (const auto& key : config_keys()) {
    if (key == "fast") continue;
    const auto help = kKeyHelp.find(key);
    app->add_option("--" + key, common.overrides[key], help != kKeyHelp.end() ? help->second : key);
  }
}

RunConfig resolve(const CLI::App* app, const CommonOptions& common) {
  RunConfig config;
  if (!common.config_file.empty()) config = load_config(common.config_file);
  if (common.fast) config.set("fast", "true");
  for (const auto& key : config_keys()) {
    if (key == "fast") continue;
    if (app->count("--" + key) > 0) config.set(key, common.overrides.at(key));
  }
  config.validate();
  return config;
}

std::string number(double value) {
  char text[40];
  std::snprintf(text, sizeof text, "%.9g", value);
  return text;
}

// Rendered config as a JSON object of key -> text value, in render order.
nlohmann::ordered_json config_object(const RunConfig& config) {
  nlohmann::ordered_json object = nlohmann::ordered_json::object();
  std::istringstream lines(render_config(config));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) object[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return object;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

int cmd_simulate(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto basis = config.basis();
  SimulationOptions options;
  options.snapshot_times = config.snapshot_times();
  options.workers = config.resolved_workers();
  const auto result = run_simulation(config.well_parameters(), config.stepper(), basis, config.mode, options);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir = config.output_dir;
  ensure_directory(dir);
  {
    auto out = open_output(dir / "timeseries.csv");
    out << "t,N\n";
    for (const auto& sample : result.observables.series) out << number(sample.time) << ',' << number(sample.pairs) << '\n';
  }
  {
    // The closing row repeats z_0 at z = +L/2 so that trapezoidal
    // integration of the periodic density is exact.
    const auto& grid = basis.grid();
    const auto& rho = result.observables.density;
    auto out = open_output(dir / "density.csv");
    out << "z,rho_e\n";
    for (std::size_t j = 0; j < grid.size(); ++j) out << number(grid.position(j)) << ',' << number(rho[j]) << '\n';
    out << number(0.5 * grid.length()) << ',' << number(rho[0]) << '\n';
  }
  double worst_completeness = 0.0;
  for (const double w : result.column_completeness) worst_completeness = std::max(worst_completeness, std::abs(w - 1.0));
  {
    nlohmann::ordered_json summary;
    summary["N_final"] = result.observables.final_pairs;
    summary["mode"] = to_string(config.mode);
    summary["density_integral"] = integrate_density(result.observables.density, basis.grid());
    summary["max_completeness_error"] = worst_completeness;
    summary["code_version"] = CQFT_VERSION;
    summary["config"] = config_object(config);
    summary["wall_time_s"] = wall;
    auto out = open_output(dir / "summary.json");
    out << summary.dump(2) << '\n';
  }
  std::cout << "N(T) = " << number(result.observables.final_pairs) << "  (" << to_string(config.mode) << ", "
            << number(wall) << " s)\n";
  return 0;
}

int cmd_sweep(const RunConfig& config, const std::vector<std::string>& axis_texts, std::string csv_path,
              std::string journal_path, bool no_cache) {
  SweepPlan plan;
  for (const auto& text : axis_texts) plan.axes.push_back(parse_axis(text));
  plan.fixed = config.well_parameters();
  plan.grid = config.grid();
  plan.stepper = config.stepper();
  plan.speed_of_light = config.c;
  if (config.cutoff > 0.0) plan.energy_cutoff = config.cutoff * config.c * config.c;
  plan.workers = config.resolved_workers();
  plan.use_cache = !no_cache;
  plan.validate();

  if (csv_path.empty()) csv_path = (fs::path(config.output_dir) / "sweep.csv").string();
  const fs::path csv(csv_path);
  if (csv.has_parent_path()) ensure_directory(csv.parent_path());
  if (journal_path.empty()) journal_path = csv_path + ".journal";

  PairCountCache cache(no_cache ? fs::path() : fs::path(journal_path));
  const auto start = std::chrono::steady_clock::now();
  const auto records = run_sweep(plan, &cache, [](SweepProgress p) {
    std::cerr << "\rsweep: " << p.completed << "/" << p.total << " runs" << std::flush;
  });
  std::cerr << '\n';
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  {
    auto out = open_output(csv);
    write_sweep_csv(out, records);
  }
  write_sweep_metadata(csv_path + ".meta.json", plan, wall);
  const auto best = find_optimum(records);
  std::cout << "max dN = " << number(best.gain) << " at Vs = " << number(best.static_depth_c2)
            << " c^2, omega = " << number(best.frequency_c2) << " c^2\n";
  return 0;
}

int cmd_spectrum(const RunConfig& config, const std::string& depths_text, std::string csv_path, bool critical,
                 const std::string& bracket_text, double tolerance) {
  const double c2 = config.c * config.c;
  const auto params = config.well_parameters();
  const auto grid = config.grid();
  const auto axis = parse_axis("Vs=" + depths_text);
  std::vector<double> depths;
  for (const double v : axis.values()) depths.push_back(v * c2);
  const auto points = spectrum_sweep(depths, grid, params, config.c);

  if (csv_path.empty()) csv_path = (fs::path(config.output_dir) / "spectrum.csv").string();
  const fs::path csv(csv_path);
  if (csv.has_parent_path()) ensure_directory(csv.parent_path());
  {
    auto out = open_output(csv);
    write_spectrum_csv(out, points, config.c);
  }
  std::cout << points.size() << " bound levels over " << depths.size() << " depths written to " << csv_path << '\n';

  if (critical) {
    const auto bracket = parse_axis("Vs=" + bracket_text + ":1");
    const double depth = critical_depth(grid, params, bracket.start * c2, bracket.stop * c2, tolerance * c2, config.c);
    std::cout << "critical depth = " << number(depth / c2) << " c^2\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electron-positron pair production in combined Sauter wells"};
  app.require_subcommand(1);

  CommonOptions simulate_opts, sweep_opts, spectrum_opts;
  auto* simulate = app.add_subcommand("simulate", "evolve the Dirac sea and write N(t), rho_e(z,T) and a summary");
  add_common(simulate, simulate_opts);
  std::string simulate_out;
  simulate->add_option("--out", simulate_out, "output directory (same as --output_dir)");

  auto* sweep = app.add_subcommand("sweep", "scan V_s and/or omega and write N_s, N_o, N_c, dN");
  add_common(sweep, sweep_opts);
  std::vector<std::string> axes;
  std::string sweep_csv, journal;
  bool no_cache = false;
  sweep->add_option("--axis", axes, "Vs=start:stop:step or omega=start:stop:step (units of c^2)");
  sweep->add_option("--csv", sweep_csv, "output CSV (default <output_dir>/sweep.csv)");
  sweep->add_option("--journal", journal, "resumption journal (default <csv>.journal)");
  sweep->add_flag("--no-cache", no_cache, "recompute every run; no journal");

  auto* spectrum = app.add_subcommand("spectrum", "bound levels of the static well versus depth");
  add_common(spectrum, spectrum_opts);
  std::string depths = "0:3:0.05", spectrum_csv, bracket = "1.9:2.2";
  bool critical = false;
  double tolerance = 0.005;
  spectrum->add_option("--depths", depths, "depth range start:stop:step in c^2");
  spectrum->add_option("--csv", spectrum_csv, "output CSV (default <output_dir>/spectrum.csv)");
  spectrum->add_flag("--critical", critical, "also locate the first diving depth");
  spectrum->add_option("--bracket", bracket, "critical-depth bracket low:high in c^2");
  spectrum->add_option("--tol", tolerance, "critical-depth tolerance in c^2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (simulate->parsed()) {
      auto config = resolve(simulate, simulate_opts);
      if (!simulate_out.empty()) config.output_dir = simulate_out;
      return cmd_simulate(config);
    }
    if (sweep->parsed()) return cmd_sweep(resolve(sweep, sweep_opts), axes, sweep_csv, journal, no_cache);
    if (spectrum->parsed()) {
      return cmd_spectrum(resolve(spectrum, spectrum_opts), depths, spectrum_csv, critical, bracket, tolerance);
    }
  } catch (const ConfigError& e) {
    std::cerr << "cqft: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericsError& e) {
    std::cerr << "cqft: numerical failure: " << e.what() << '\n';
    return kExitNumerics;
  } catch (const std::exception& e) {
    std::cerr << "cqft: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
