#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cqft/fourier.hpp"
#include "cqft/grid.hpp"
#include "cqft/potential.hpp"

namespace cqft {

/// Largest potential phase |V|*dt allowed per step.
inline constexpr double kMaxPhasePerStep = 0.05;

/// Relative norm drift beyond which a run is declared unstable.
inline constexpr double kNormDriftLimit = 1e-6;

struct StepperConfig {
  double time_step = 1e-7;
  double duration = 0.002;
  bool midpoint_sampling = true;

  void validate() const;

  /// round(T/dt); the step is then stretched to divide T exactly.
  std::size_t steps() const;
  double effective_step() const { return duration / static_cast<double>(steps()); }
};

/// Strang-split evolution of a batch of spinors kept in momentum space.
///
/// Column c holds spectral coefficients psi~_k in FFT slot order (see
/// NumericalGrid::fft_slot); the upper component is row 2c, the lower 2c+1.
/// Each step applies K(dt/2) V(dt) K(dt/2) with K the exact free exponential;
/// interior kinetic halves are fused, and the state is brought back to a
/// synchronized time at every checkpoint.
class SplitStepEvolver {
 public:
  struct Schedule {
    WellParameters params;
    PotentialMode mode = PotentialMode::combined;
    double start = 0.0;
    double step = 1e-7;
    std::size_t steps = 0;
    double switch_off = 0.002;
    bool midpoint_sampling = true;
  };

  SplitStepEvolver(const NumericalGrid& grid, double speed_of_light, std::size_t columns);

  const NumericalGrid& grid() const { return grid_; }
  std::size_t columns() const { return columns_; }

  std::span<complex> upper(std::size_t column) { return buffer_.row(2 * column); }
  std::span<complex> lower(std::size_t column) { return buffer_.row(2 * column + 1); }

  /// Sum_k |psi~_k|^2, equal to the position-space norm by Parseval.
  double norm_squared(std::size_t column);

  void clear();

  /// Runs schedule.steps steps. `observe(step)` is called after every step
  /// listed in `checkpoints` (ascending, each in [1, steps]) and after the
  /// last step, with the batch at time start + step*dt.
  void run(const Schedule& schedule, std::span<const std::size_t> checkpoints,
           const std::function<void(std::size_t)>& observe);

 private:
  void apply_kinetic(const std::vector<complex>& table);

  NumericalGrid grid_;
  double c_;
  std::size_t columns_;
  FourierBatch buffer_;
  std::vector<double> slot_shape_;
  std::vector<complex> phase_;
  std::vector<complex> half_plain_, half_scaled_, full_scaled_;
  double tables_step_ = -1.0;
};

/// exp(-i H0 tau) applied per momentum.
SpinorField kinetic_step(const SpinorField& field, double speed_of_light, double tau);

/// psi_j <- psi_j exp(-i V(z_j, t_sample) dt), same phase on both components.
SpinorField potential_step(const SpinorField& field, double t_sample, const WellParameters& params,
                           PotentialMode mode, double dt);

/// Evolves `field` over [0, T]. Throws NumericsError on norm drift.
SpinorField evolve(const SpinorField& field, const WellParameters& params, const StepperConfig& stepper,
                   PotentialMode mode, double speed_of_light = kSpeedOfLight);

/// Evolves over [from, to] within the switching window [0, T] of `stepper`,
/// with round((to - from)/dt) steps.
SpinorField evolve(const SpinorField& field, const WellParameters& params, const StepperConfig& stepper,
                   PotentialMode mode, double from, double to, double speed_of_light = kSpeedOfLight);

/// Throws ConfigError when |V|max * dt exceeds kMaxPhasePerStep.
void check_phase_guard(const WellParameters& params, PotentialMode mode, double dt);

}  // namespace cqft
