#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqft/grid.hpp"
#include "cqft/potential.hpp"
#include "cqft/propagator.hpp"

namespace cqft {

enum class SweepParameter { static_depth, frequency };

/// One scan axis, values in units of c^2: start, start + step, ... <= stop.
struct SweepAxis {
  SweepParameter parameter = SweepParameter::static_depth;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  void validate() const;
  std::vector<double> values() const;
};

/// Parses `Vs=0:3:0.03` or `omega=0.02:3.5:0.02`; a bare value `Vs=2.5`
/// gives a single-point axis.
SweepAxis parse_axis(std::string_view text);

struct SweepPlan {
  std::vector<SweepAxis> axes;  // at most two, distinct parameters
  WellParameters fixed;         // supplies whichever of V_s, omega has no axis
  NumericalGrid grid{1.2, 256};
  StepperConfig stepper;
  double speed_of_light = kSpeedOfLight;
  std::optional<double> energy_cutoff;
  std::size_t workers = 1;
  bool use_cache = true;

  void validate() const;

  /// Hash of everything that must match for two pair counts to be
  /// interchangeable, apart from the swept values themselves.
  std::string numerics_digest() const;
};

struct SweepRecord {
  double static_depth_c2 = 0.0;
  double frequency_c2 = 0.0;
  double static_pairs = 0.0;       // N_s
  double oscillating_pairs = 0.0;  // N_o
  double combined_pairs = 0.0;     // N_c
  double gain = 0.0;               // N_c - N_s - N_o

  bool operator==(const SweepRecord&) const = default;
};

/// Pair counts keyed by run identity, optionally journaled to a text file so
/// an interrupted sweep can resume. Thread-safe.
class PairCountCache {
 public:
  PairCountCache() = default;
  explicit PairCountCache(std::filesystem::path journal);

  std::optional<double> find(const std::string& key) const;
  void store(const std::string& key, double pairs);
  std::size_t size() const;
  const std::filesystem::path& journal() const { return journal_; }

 private:
  std::filesystem::path journal_;
  mutable std::mutex mutex_;
  std::map<std::string, double> values_;
};

struct SweepProgress {
  std::size_t completed;
  std::size_t total;
};

/// Runs every grid point of the plan. Records come out in row-major axis
/// order (first axis outermost). N_s and N_o are computed once per distinct
/// value when caching is enabled. `cache` may be shared across plans.
std::vector<SweepRecord> run_sweep(const SweepPlan& plan, PairCountCache* cache = nullptr,
                                   const std::function<void(SweepProgress)>& progress = {});

/// Record with the largest gain; ties go to smaller omega, then smaller V_s.
SweepRecord find_optimum(std::span<const SweepRecord> records);

/// CSV with header `Vs_over_c2,omega_over_c2,N_s,N_o,N_c,dN`, 9 significant digits.
void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records);

/// Parses a sweep CSV and verifies dN = N_c - N_s - N_o on every row.
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

/// Sidecar JSON describing the numerics, code version and wall time.
void write_sweep_metadata(const std::filesystem::path& path, const SweepPlan& plan, double wall_seconds);

}  // namespace cqft
