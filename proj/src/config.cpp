#include "cqft/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "cqft/error.hpp"

namespace cqft {

namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw ConfigError("bad number for '" + std::string(key) + "': '" + std::string(value) + "'");
  }
  return out;
}

std::size_t to_count(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("bad count for '" + std::string(key) + "': '" + std::string(value) + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("bad boolean for '" + std::string(key) + "': '" + std::string(value) + "'");
}

std::string exact(double value) {
  char text[40];
  std::snprintf(text, sizeof text, "%.17g", value);
  return text;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"fast",  "c",     "L",      "Nz",        "dt",     "T",
                                                "midpoint", "Vs", "Vo",     "omega",     "D",      "W",
                                                "shape", "sign",  "mode",   "snapshots", "cutoff", "workers",
                                                "output_dir"};
  return keys;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "fast") {
    fast = to_bool(key, value);
    if (fast) {
      Nz = 128;
      dt = 2e-7;
    }
  } else if (key == "c") {
    c = to_double(key, value);
  } else if (key == "L") {
    L = to_double(key, value);
  } else if (key == "Nz") {
    Nz = to_count(key, value);
  } else if (key == "dt") {
    dt = to_double(key, value);
  } else if (key == "T") {
    T = to_double(key, value);
  } else if (key == "midpoint") {
    midpoint = to_bool(key, value);
  } else if (key == "Vs") {
    Vs = to_double(key, value);
  } else if (key == "Vo") {
    Vo = to_double(key, value);
  } else if (key == "omega") {
    omega = to_double(key, value);
  } else if (key == "D") {
    D = to_double(key, value);
  } else if (key == "W") {
    W = to_double(key, value);
  } else if (key == "shape") {
    shape = parse_well_shape(value);
  } else if (key == "sign") {
    sign = parse_sign_convention(value);
  } else if (key == "mode") {
    mode = parse_potential_mode(value);
  } else if (key == "snapshots") {
    snapshots = to_count(key, value);
  } else if (key == "cutoff") {
    cutoff = to_double(key, value);
  } else if (key == "workers") {
    workers = to_count(key, value);
  } else if (key == "output_dir") {
    output_dir = std::string(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  well_parameters().validate();
  stepper().validate();
  (void)grid();
  if (!(c > 0.0)) throw ConfigError("c must be positive");
  if (cutoff != 0.0 && !(cutoff >= 1.0)) throw ConfigError("cutoff must be 0 (off) or at least 1 c^2");
  if (snapshots == 0) throw ConfigError("snapshots must be at least 1");
  check_phase_guard(well_parameters(), mode, stepper().effective_step());
}

WellParameters RunConfig::well_parameters() const {
  const double c2 = c * c;
  WellParameters params;
  params.static_depth = Vs * c2;
  params.oscillating_depth = Vo * c2;
  params.frequency = omega * c2;
  params.width = D / c;
  params.edge_width = W / c;
  params.shape = shape;
  params.sign = sign;
  return params;
}

NumericalGrid RunConfig::grid() const { return build_grid(L, Nz); }

StepperConfig RunConfig::stepper() const { return {dt, T, midpoint}; }

FreeModeBasis RunConfig::basis() const {
  std::optional<double> energy_cutoff;
  if (cutoff > 0.0) energy_cutoff = cutoff * c * c;
  return build_free_basis(grid(), c, energy_cutoff);
}

std::vector<double> RunConfig::snapshot_times() const {
  std::vector<double> times;
  for (std::size_t i = 0; i <= snapshots; ++i) times.push_back(T * static_cast<double>(i) / static_cast<double>(snapshots));
  return times;
}

std::size_t RunConfig::resolved_workers() const {
  if (workers > 0) return workers;
  if (const char* env = std::getenv("CQFT_WORKERS")) {
    const std::string_view text(env);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size() && value > 0) return value;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t line_number = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_number) + " is not key = value");
    }
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

std::string render_config(const RunConfig& config) {
  std::ostringstream out;
  out << "fast = " << (config.fast ? "true" : "false") << '\n'
      << "c = " << exact(config.c) << '\n'
      << "L = " << exact(config.L) << '\n'
      << "Nz = " << config.Nz << '\n'
      << "dt = " << exact(config.dt) << '\n'
      << "T = " << exact(config.T) << '\n'
      << "midpoint = " << (config.midpoint ? "true" : "false") << '\n'
      << "Vs = " << exact(config.Vs) << '\n'
      << "Vo = " << exact(config.Vo) << '\n'
      << "omega = " << exact(config.omega) << '\n'
      << "D = " << exact(config.D) << '\n'
      << "W = " << exact(config.W) << '\n'
      << "shape = " << to_string(config.shape) << '\n'
      << "sign = " << to_string(config.sign) << '\n'
      << "mode = " << to_string(config.mode) << '\n'
      << "snapshots = " << config.snapshots << '\n'
      << "cutoff = " << exact(config.cutoff) << '\n'
      << "workers = " << config.workers << '\n'
      << "output_dir = " << config.output_dir << '\n';
  return out.str();
}

}  // namespace cqft
