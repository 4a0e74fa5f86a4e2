#include "cqft/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cqft/error.hpp"

namespace cqft {

void StepperConfig::validate() const {
  if (!(time_step > 0.0) || !std::isfinite(time_step)) throw ConfigError("time step must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be positive");
  if (duration / time_step < 0.5) throw ConfigError("duration shorter than half a time step");
}

std::size_t StepperConfig::steps() const {
  validate();
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(duration / time_step)));
}

void check_phase_guard(const WellParameters& params, PotentialMode mode, double dt) {
  const double phase = params.max_abs_potential(mode) * dt;
  if (phase > kMaxPhasePerStep) {
    std::ostringstream msg;
    msg << "time step too coarse: potential phase per step " << phase << " rad exceeds " << kMaxPhasePerStep;
    throw ConfigError(msg.str());
  }
}

SplitStepEvolver::SplitStepEvolver(const NumericalGrid& grid, double speed_of_light, std::size_t columns)
    : grid_(grid), c_(speed_of_light), columns_(columns), buffer_(grid.size(), 2 * columns) {
  if (columns == 0) throw ConfigError("evolver needs at least one column");
  const std::size_t n = grid.size();
  slot_shape_.resize(n);
  phase_.resize(n);
}

void SplitStepEvolver::clear() {
  for (auto& v : buffer_.data()) v = 0.0;
}

double SplitStepEvolver::norm_squared(std::size_t column) {
  double sum = 0.0;
  for (const auto& v : upper(column)) sum += std::norm(v);
  for (const auto& v : lower(column)) sum += std::norm(v);
  return sum;
}

void SplitStepEvolver::apply_kinetic(const std::vector<complex>& table) {
  const std::size_t n = grid_.size();
  for (std::size_t col = 0; col < columns_; ++col) {
    complex* up = buffer_.row(2 * col).data();
    complex* lo = buffer_.row(2 * col + 1).data();
    for (std::size_t r = 0; r < n; ++r) {
      const complex x = up[r];
      const complex y = lo[r];
      const complex* k = &table[3 * r];
      up[r] = k[0] * x + k[1] * y;
      lo[r] = k[1] * x + k[2] * y;
    }
  }
}

namespace {

// Rows of exp(-i H0(p) tau) = cos(E tau) I - i sin(E tau)/E H0(p), stored as
// (K00, K01 = K10, K11) per FFT slot.
std::vector<complex> kinetic_table(const NumericalGrid& grid, double c, double tau, double scale) {
  const std::size_t n = grid.size();
  const double c2 = c * c;
  std::vector<complex> table(3 * n);
  for (std::size_t r = 0; r < n; ++r) {
    const int k = r < n / 2 ? static_cast<int>(r) : static_cast<int>(r) - static_cast<int>(n);
    const double p = grid.momentum(static_cast<std::size_t>(k + static_cast<int>(n / 2)));
    const double energy = std::sqrt(c2 * c2 + c2 * p * p);
    const double cs = std::cos(energy * tau);
    const double sn = std::sin(energy * tau) / energy;
    table[3 * r + 0] = scale * complex(cs, -sn * c2);
    table[3 * r + 1] = scale * complex(0.0, -sn * c * p);
    table[3 * r + 2] = scale * complex(cs, sn * c2);
  }
  return table;
}

}  // namespace

void SplitStepEvolver::run(const Schedule& schedule, std::span<const std::size_t> checkpoints,
                           const std::function<void(std::size_t)>& observe) {
  const std::size_t n = grid_.size();
  const double dt = schedule.step;
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  check_phase_guard(schedule.params, schedule.mode, dt);

  if (tables_step_ != dt) {
    const double inv_n = 1.0 / static_cast<double>(n);
    half_plain_ = kinetic_table(grid_, c_, 0.5 * dt, 1.0);
    half_scaled_ = kinetic_table(grid_, c_, 0.5 * dt, inv_n);
    full_scaled_ = kinetic_table(grid_, c_, dt, inv_n);
    tables_step_ = dt;
  }
  for (std::size_t r = 0; r < n; ++r) {
    slot_shape_[r] = sauter_shape(grid_.position((r + n / 2) % n), schedule.params);
  }

  const double static_coeff = schedule.params.static_coefficient(schedule.mode);
  std::size_t next_checkpoint = 0;
  bool synchronized = true;
  for (std::size_t s = 0; s < schedule.steps; ++s) {
    if (synchronized) apply_kinetic(half_plain_);

    const double t_sample =
        schedule.start + (static_cast<double>(s) + (schedule.midpoint_sampling ? 0.5 : 0.0)) * dt;
    if (t_sample < 0.0 || t_sample > schedule.switch_off) {
      std::fill(phase_.begin(), phase_.end(), complex(1.0, 0.0));
    } else {
      const double osc_coeff = schedule.params.oscillating_coefficient(t_sample, schedule.mode);
      for (std::size_t r = 0; r < n; ++r) {
        const double v = static_coeff * slot_shape_[r] + osc_coeff * slot_shape_[r];
        phase_[r] = std::polar(1.0, -v * dt);
      }
    }

    buffer_.backward();
    for (std::size_t row = 0; row < 2 * columns_; ++row) {
      complex* x = buffer_.row(row).data();
      for (std::size_t r = 0; r < n; ++r) x[r] *= phase_[r];
    }
    buffer_.forward();

    const std::size_t done = s + 1;
    while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] < done) ++next_checkpoint;
    const bool at_checkpoint =
        done == schedule.steps || (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == done);
    if (at_checkpoint) {
      apply_kinetic(half_scaled_);
      synchronized = true;
      if (observe) observe(done);
    } else {
      apply_kinetic(full_scaled_);
      synchronized = false;
    }
  }
}

namespace {

// Loads a position-space field into column 0 (FFT slot order).
void load_column(SplitStepEvolver& evolver, const SpinorField& field) {
  const auto& grid = field.grid();
  const auto [upper, lower] = to_momentum(field);
  auto up = evolver.upper(0);
  auto lo = evolver.lower(0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t slot = grid.fft_slot(grid.wavenumber(i));
    up[slot] = upper[i];
    lo[slot] = lower[i];
  }
}

SpinorField store_column(SplitStepEvolver& evolver) {
  const auto& grid = evolver.grid();
  const std::size_t n = grid.size();
  std::vector<complex> upper(n), lower(n);
  auto up = evolver.upper(0);
  auto lo = evolver.lower(0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t slot = grid.fft_slot(grid.wavenumber(i));
    upper[i] = up[slot];
    lower[i] = lo[slot];
  }
  return from_momentum(grid, upper, lower);
}

}  // namespace

SpinorField kinetic_step(const SpinorField& field, double speed_of_light, double tau) {
  if (!(tau > 0.0)) throw ConfigError("kinetic step duration must be positive");
  const auto& grid = field.grid();
  auto [upper, lower] = to_momentum(field);
  const double c2 = speed_of_light * speed_of_light;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = grid.momentum(i);
    const double energy = std::sqrt(c2 * c2 + c2 * p * p);
    const double cs = std::cos(energy * tau);
    const double sn = std::sin(energy * tau) / energy;
    const complex k00(cs, -sn * c2), k01(0.0, -sn * speed_of_light * p), k11(cs, sn * c2);
    const complex x = upper[i];
    const complex y = lower[i];
    upper[i] = k00 * x + k01 * y;
    lower[i] = k01 * x + k11 * y;
  }
  return from_momentum(grid, upper, lower);
}

SpinorField potential_step(const SpinorField& field, double t_sample, const WellParameters& params,
                           PotentialMode mode, double dt) {
  SpinorField out = field;
  const auto& grid = field.grid();
  auto up = out.upper();
  auto lo = out.lower();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const complex phase = std::polar(1.0, -potential_at(grid.position(j), t_sample, params, mode) * dt);
    up[j] *= phase;
    lo[j] *= phase;
  }
  return out;
}

SpinorField evolve(const SpinorField& field, const WellParameters& params, const StepperConfig& stepper,
                   PotentialMode mode, double speed_of_light) {
  return evolve(field, params, stepper, mode, 0.0, stepper.duration, speed_of_light);
}

SpinorField evolve(const SpinorField& field, const WellParameters& params, const StepperConfig& stepper,
                   PotentialMode mode, double from, double to, double speed_of_light) {
  stepper.validate();
  params.validate();
  if (!(to > from)) throw ConfigError("evolution interval must have positive length");
  const auto steps = static_cast<std::size_t>(std::llround((to - from) / stepper.time_step));
  if (steps == 0) throw ConfigError("evolution interval shorter than half a time step");

  SplitStepEvolver evolver(field.grid(), speed_of_light, 1);
  load_column(evolver, field);
  const double initial = evolver.norm_squared(0);

  SplitStepEvolver::Schedule schedule;
  schedule.params = params;
  schedule.mode = mode;
  schedule.start = from;
  schedule.step = (to - from) / static_cast<double>(steps);
  schedule.steps = steps;
  schedule.switch_off = stepper.duration;
  schedule.midpoint_sampling = stepper.midpoint_sampling;
  evolver.run(schedule, {}, {});

  const double final_norm = evolver.norm_squared(0);
  if (std::abs(final_norm - initial) > kNormDriftLimit * std::max(initial, 1e-300)) {
    throw NumericsError("norm drift " + std::to_string(final_norm - initial) + " exceeds stability limit");
  }
  return store_column(evolver);
}

}  // namespace cqft
