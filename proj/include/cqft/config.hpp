#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cqft/grid.hpp"
#include "cqft/potential.hpp"
#include "cqft/propagator.hpp"

namespace cqft {

/// Everything a CLI run needs, in user-facing units: energies and
/// frequencies in c^2, well widths D and W in 1/c, everything else in atomic
/// units.
///
/// The flat text form is `key = value` per line with `#` comments. Keys are
/// applied in order, and `fast = true` loads the coarse preset (N_z = 128,
/// dt = 2e-7) at the point where it appears, so later keys still override it.
struct RunConfig {
  bool fast = false;
  double c = kSpeedOfLight;
  double L = 1.2;
  std::size_t Nz = 256;
  double dt = 1e-7;
  double T = 0.002;
  bool midpoint = true;
  double Vs = 0.0;
  double Vo = 1.47;
  double omega = 1.5;
  double D = 10.0;
  double W = 0.3;
  WellShape shape = WellShape::well;
  SignConvention sign = SignConvention::as_printed;
  PotentialMode mode = PotentialMode::combined;
  std::size_t snapshots = 20;  // N(t) intervals over [0, T]
  double cutoff = 0.0;         // energy cutoff in c^2; 0 disables it
  std::size_t workers = 0;     // 0: CQFT_WORKERS or hardware concurrency
  std::string output_dir = ".";

  bool operator==(const RunConfig&) const = default;

  /// Sets one key from its text value. Throws ConfigError on unknown keys
  /// or malformed values.
  void set(std::string_view key, std::string_view value);

  void validate() const;

  WellParameters well_parameters() const;
  NumericalGrid grid() const;
  StepperConfig stepper() const;
  FreeModeBasis basis() const;
  std::vector<double> snapshot_times() const;
  std::size_t resolved_workers() const;
};

/// Known keys, in render order.
const std::vector<std::string>& config_keys();

RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
std::string render_config(const RunConfig& config);

}  // namespace cqft
