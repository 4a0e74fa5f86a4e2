#include "cqft/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "cqft/error.hpp"
#include "cqft/fourier.hpp"

namespace cqft {

BogoliubovMatrix::BogoliubovMatrix(std::size_t rows, std::size_t cols, double time)
    : rows_(rows), cols_(cols), time_(time), values_(rows * cols) {}

double BogoliubovMatrix::column_weight(std::size_t n) const {
  double sum = 0.0;
  for (const auto& v : column(n)) sum += std::norm(v);
  return sum;
}

double BogoliubovMatrix::pair_number() const {
  double total = 0.0;
  for (std::size_t n = 0; n < cols_; ++n) total += column_weight(n);
  return total;
}

namespace {

// Which free modes seed the columns and which ones they are projected onto.
enum class Seed { negative, positive };

struct EngineRequest {
  WellParameters params;
  StepperConfig stepper;
  PotentialMode mode;
  Seed seed;
  std::vector<double> snapshot_times;
  std::size_t workers;
};

struct EngineOutput {
  std::vector<double> snapshot_times;         // snapped, ascending, unique
  std::vector<std::vector<double>> weights;   // [snapshot][column]
  BogoliubovMatrix final_matrix;              // target rows x seed columns
  std::vector<double> norms;
  std::vector<double> completeness;
};

std::vector<std::size_t> snap_to_steps(std::vector<double>& times, const StepperConfig& stepper) {
  const std::size_t steps = stepper.steps();
  const double dt = stepper.effective_step();
  if (times.empty()) {
    for (int i = 0; i <= 20; ++i) times.push_back(stepper.duration * i / 20.0);
  }
  std::vector<std::size_t> snapped;
  for (const double t : times) {
    if (!(t >= 0.0) || t > stepper.duration * (1.0 + 1e-12)) {
      throw ConfigError("snapshot time " + std::to_string(t) + " outside [0, T]");
    }
    snapped.push_back(std::min<std::size_t>(steps, static_cast<std::size_t>(std::llround(t / dt))));
  }
  snapped.push_back(steps);
  std::sort(snapped.begin(), snapped.end());
  snapped.erase(std::unique(snapped.begin(), snapped.end()), snapped.end());
  times.clear();
  for (const auto s : snapped) times.push_back(static_cast<double>(s) * dt);
  return snapped;
}

EngineOutput run_engine(EngineRequest request, const FreeModeBasis& basis) {
  request.params.validate();
  request.stepper.validate();
  if (basis.size() == 0) throw ConfigError("free-mode basis is empty");

  const auto& grid = basis.grid();
  const std::size_t modes = basis.size();
  const auto snapshot_steps = snap_to_steps(request.snapshot_times, request.stepper);
  const std::size_t final_steps = request.stepper.steps();

  EngineOutput out;
  out.snapshot_times = request.snapshot_times;
  out.weights.assign(snapshot_steps.size(), std::vector<double>(modes, 0.0));
  out.final_matrix = BogoliubovMatrix(modes, modes, request.stepper.duration);
  out.norms.assign(modes, 0.0);
  out.completeness.assign(modes, 0.0);

  std::vector<std::size_t> slots(modes);
  for (std::size_t m = 0; m < modes; ++m) slots[m] = grid.fft_slot(basis.modes()[m].wavenumber);

  const std::size_t blocks = (modes + kColumnBlock - 1) / kColumnBlock;
  std::atomic<std::size_t> next_block{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    try {
      for (std::size_t b = next_block++; b < blocks; b = next_block++) {
        const std::size_t first = b * kColumnBlock;
        const std::size_t count = std::min(kColumnBlock, modes - first);
        SplitStepEvolver evolver(grid, basis.speed_of_light(), count);
        for (std::size_t c = 0; c < count; ++c) {
          const auto& mode = basis.modes()[first + c];
          const std::size_t slot = slots[first + c];
          if (request.seed == Seed::negative) {
            evolver.upper(c)[slot] = -mode.b;
            evolver.lower(c)[slot] = mode.a;
          } else {
            evolver.upper(c)[slot] = mode.a;
            evolver.lower(c)[slot] = mode.b;
          }
        }

        // Projects column c onto both free-mode families; the target family
        // (opposite sign to the seed) fills the Bogoliubov matrix.
        auto project = [&](std::size_t c, std::size_t snapshot, bool final) {
          const auto up = evolver.upper(c);
          const auto lo = evolver.lower(c);
          const std::size_t column = first + c;
          double target_weight = 0.0;
          double other_weight = 0.0;
          for (std::size_t m = 0; m < modes; ++m) {
            const auto& mode = basis.modes()[m];
            const complex x = up[slots[m]];
            const complex y = lo[slots[m]];
            const complex plus = mode.a * x + mode.b * y;
            const complex minus = -mode.b * x + mode.a * y;
            const complex target = request.seed == Seed::negative ? plus : minus;
            target_weight += std::norm(target);
            if (final) {
              out.final_matrix(m, column) = target;
              other_weight += std::norm(request.seed == Seed::negative ? minus : plus);
            }
          }
          out.weights[snapshot][column] = target_weight;
          if (final) out.completeness[column] = target_weight + other_weight;
        };

        auto observe = [&](std::size_t step) {
          const auto it = std::lower_bound(snapshot_steps.begin(), snapshot_steps.end(), step);
          const bool final = step == final_steps;
          if (it == snapshot_steps.end() || *it != step) return;
          const auto snapshot = static_cast<std::size_t>(it - snapshot_steps.begin());
          for (std::size_t c = 0; c < count; ++c) {
            const double norm = evolver.norm_squared(c);
            if (std::abs(norm - 1.0) > kNormDriftLimit) {
              std::ostringstream msg;
              msg << "norm drift " << norm - 1.0 << " in mode k=" << basis.modes()[first + c].wavenumber
                  << " at step " << step;
              throw NumericsError(msg.str());
            }
            project(c, snapshot, final);
            if (final) out.norms[first + c] = norm;
          }
        };

        observe(0);
        SplitStepEvolver::Schedule schedule;
        schedule.params = request.params;
        schedule.mode = request.mode;
        schedule.start = 0.0;
        schedule.step = request.stepper.effective_step();
        schedule.steps = final_steps;
        schedule.switch_off = request.stepper.duration;
        schedule.midpoint_sampling = request.stepper.midpoint_sampling;
        evolver.run(schedule, snapshot_steps, observe);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next_block = blocks;
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(request.workers, 1, std::max<std::size_t>(blocks, 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace

SimulationResult run_simulation(const WellParameters& params, const StepperConfig& stepper,
                                const FreeModeBasis& basis, PotentialMode mode, const SimulationOptions& options) {
  EngineRequest request{params, stepper, mode, Seed::negative, options.snapshot_times, options.workers};
  auto engine = run_engine(std::move(request), basis);

  SimulationResult result;
  result.observables.mode = mode;
  for (std::size_t s = 0; s < engine.snapshot_times.size(); ++s) {
    double total = 0.0;
    for (const double w : engine.weights[s]) total += w;
    result.observables.series.push_back({engine.snapshot_times[s], total});
  }
  result.matrix = std::move(engine.final_matrix);
  result.observables.final_pairs = result.observables.series.back().pairs;
  if (options.compute_density) result.observables.density = electron_density(result.matrix, basis);
  result.column_norms = std::move(engine.norms);
  result.column_completeness = std::move(engine.completeness);
  return result;
}

std::vector<double> electron_density(const BogoliubovMatrix& matrix, const FreeModeBasis& basis) {
  const auto& grid = basis.grid();
  const std::size_t n = grid.size();
  if (matrix.rows() != basis.size()) throw ConfigError("Bogoliubov matrix rows do not match the basis");
  std::vector<double> density(n, 0.0);
  FourierBatch fft(n, 2);
  const double inv_length = 1.0 / grid.length();
  for (std::size_t col = 0; col < matrix.cols(); ++col) {
    for (auto& v : fft.data()) v = 0.0;
    auto up = fft.row(0);
    auto lo = fft.row(1);
    for (std::size_t p = 0; p < matrix.rows(); ++p) {
      const auto& mode = basis.modes()[p];
      const std::size_t slot = grid.fft_slot(mode.wavenumber);
      const complex u = matrix(p, col);
      up[slot] = u * mode.a;
      lo[slot] = u * mode.b;
    }
    fft.backward();
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t r = (j + n / 2) % n;
      density[j] += (std::norm(up[r]) + std::norm(lo[r])) * inv_length;
    }
  }
  return density;
}

double integrate_density(std::span<const double> density, const NumericalGrid& grid) {
  double sum = 0.0;
  for (const double v : density) sum += v;
  return sum * grid.spacing();
}

double positron_number(const WellParameters& params, const StepperConfig& stepper, const FreeModeBasis& basis,
                       PotentialMode mode, const SimulationOptions& options) {
  EngineRequest request{params, stepper, mode, Seed::positive, {}, options.workers};
  const auto engine = run_engine(std::move(request), basis);
  return engine.final_matrix.pair_number();
}

GainResult make_gain(double combined, double static_only, double oscillating_only) {
  return {combined, static_only, oscillating_only, combined - static_only - oscillating_only};
}

GainResult gain_number(const WellParameters& params, const StepperConfig& stepper, const FreeModeBasis& basis,
                       const SimulationOptions& options) {
  SimulationOptions lean = options;
  lean.compute_density = false;
  const double combined = run_simulation(params, stepper, basis, PotentialMode::combined, lean).observables.final_pairs;
  const double static_only =
      run_simulation(params, stepper, basis, PotentialMode::static_only, lean).observables.final_pairs;
  const double oscillating =
      run_simulation(params, stepper, basis, PotentialMode::oscillating_only, lean).observables.final_pairs;
  return make_gain(combined, static_only, oscillating);
}

}  // namespace cqft
