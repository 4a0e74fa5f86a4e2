#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cqft/grid.hpp"
#include "cqft/potential.hpp"
#include "cqft/propagator.hpp"

namespace cqft {

/// U_pn(t) = <u_p|U(t)|v_n> over retained positive (rows) and negative
/// (columns) modes. Column-major: column n is contiguous.
class BogoliubovMatrix {
 public:
  BogoliubovMatrix() = default;
  BogoliubovMatrix(std::size_t rows, std::size_t cols, double time);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double time() const { return time_; }

  complex& operator()(std::size_t p, std::size_t n) { return values_[n * rows_ + p]; }
  complex operator()(std::size_t p, std::size_t n) const { return values_[n * rows_ + p]; }
  std::span<complex> column(std::size_t n) { return {values_.data() + n * rows_, rows_}; }
  std::span<const complex> column(std::size_t n) const { return {values_.data() + n * rows_, rows_}; }

  /// Sum_p |U_pn|^2 with p ascending.
  double column_weight(std::size_t n) const;

  /// Sum_n Sum_p |U_pn|^2, n outer ascending, p inner ascending.
  double pair_number() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double time_ = 0.0;
  std::vector<complex> values_;
};

struct TimeSample {
  double time;
  double pairs;
};

struct PairObservables {
  PotentialMode mode = PotentialMode::combined;
  std::vector<TimeSample> series;
  std::vector<double> density;  // rho_e(z_j, T) on the grid
  double final_pairs = 0.0;
};

struct SimulationOptions {
  /// Times at which N(t) is recorded, snapped to the step lattice. Empty
  /// means 21 evenly spaced times 0, T/20, ..., T.
  std::vector<double> snapshot_times;
  std::size_t workers = 1;
  bool compute_density = true;
};

struct SimulationResult {
  PairObservables observables;
  BogoliubovMatrix matrix;                // at t = T
  std::vector<double> column_norms;       // ||U(T) v_n||^2
  std::vector<double> column_completeness;  // Sum_p |U_pn|^2 + Sum_n' |U_n'n|^2
};

/// Number of columns evolved together; fixed so results do not depend on the
/// worker count.
inline constexpr std::size_t kColumnBlock = 8;

SimulationResult run_simulation(const WellParameters& params, const StepperConfig& stepper,
                                const FreeModeBasis& basis, PotentialMode mode,
                                const SimulationOptions& options = {});

/// rho_e(z_j) = Sum_n |Sum_p U_pn u_p(z_j)|^2.
std::vector<double> electron_density(const BogoliubovMatrix& matrix, const FreeModeBasis& basis);

/// Sum_j rho_j dz.
double integrate_density(std::span<const double> density, const NumericalGrid& grid);

/// Created-positron count Sum_{n,p} |<v_n|U(T)|u_p>|^2, from evolving the
/// positive modes. Agrees with the electron count for a neutral vacuum.
double positron_number(const WellParameters& params, const StepperConfig& stepper, const FreeModeBasis& basis,
                       PotentialMode mode, const SimulationOptions& options = {});

struct GainResult {
  double combined = 0.0;
  double static_only = 0.0;
  double oscillating_only = 0.0;
  double gain = 0.0;  // combined - static_only - oscillating_only
};

GainResult make_gain(double combined, double static_only, double oscillating_only);

GainResult gain_number(const WellParameters& params, const StepperConfig& stepper, const FreeModeBasis& basis,
                       const SimulationOptions& options = {});

}  // namespace cqft
