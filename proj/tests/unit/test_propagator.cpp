#include <doctest.h>

#include <cmath>

#include "cqft/error.hpp"
#include "cqft/propagator.hpp"
#include "oracles.hpp"

using namespace cqft;
using doctest::Approx;

namespace {
constexpr double c = kSpeedOfLight;
constexpr double c2 = c * c;

WellParameters strong_well() {
  WellParameters p;
  p.static_depth = 2.1 * c2;
  return p;
}

double max_abs_diff(const SpinorField& a, const SpinorField& b) { return a.max_difference(b); }
}  // namespace

TEST_SUITE("propagator") {

TEST_CASE("kinetic step on eigenmodes is a pure phase") {
  const auto basis = build_free_basis(build_grid(1.2, 32), c);
  const double tau = 3.7e-5;
  for (const std::size_t m : {0u, 5u, 16u, 31u}) {
    const auto& mode = basis.modes()[m];
    const auto u = basis.positive_mode(m);
    const auto v = basis.negative_mode(m);
    const auto ku = kinetic_step(u, c, tau);
    const auto kv = kinetic_step(v, c, tau);
    const complex phase_u = std::polar(1.0, -mode.energy * tau);
    const complex phase_v = std::polar(1.0, mode.energy * tau);
    for (std::size_t j = 0; j < 32; ++j) {
      CHECK(std::abs(ku.upper()[j] - phase_u * u.upper()[j]) < 1e-12);
      CHECK(std::abs(ku.lower()[j] - phase_u * u.lower()[j]) < 1e-12);
      CHECK(std::abs(kv.upper()[j] - phase_v * v.upper()[j]) < 1e-12);
      CHECK(std::abs(kv.lower()[j] - phase_v * v.lower()[j]) < 1e-12);
    }
  }
  const auto field = oracle::random_field(basis.grid(), 2);
  CHECK(kinetic_step(field, c, tau).norm_squared() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("potential step") {
  const auto grid = build_grid(1.2, 64);
  const auto field = oracle::random_field(grid, 4);

  WellParameters zero;
  zero.oscillating_depth = 0.0;
  CHECK(field.max_difference(potential_step(field, 1e-4, zero, PotentialMode::combined, 1e-7)) == 0.0);

  // A well much wider than the box is flat: S = 1 to double precision.
  WellParameters flat;
  flat.width = 100.0;
  flat.static_depth = 2.0 * c2;
  const double dt = 1e-7;
  const auto stepped = potential_step(field, 0.0, flat, PotentialMode::static_only, dt);
  const complex phase = std::polar(1.0, -flat.static_depth * dt);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(std::abs(stepped.upper()[j] - phase * field.upper()[j]) < 1e-14);
    CHECK(std::abs(stepped.lower()[j] - phase * field.lower()[j]) < 1e-14);
  }

  const auto well = potential_step(field, 2e-4, strong_well(), PotentialMode::combined, dt);
  CHECK(well.norm_squared() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant potential leaves pair observables unchanged") {
  const auto basis = build_free_basis(build_grid(1.2, 32), c);
  WellParameters flat;
  flat.width = 100.0;
  flat.static_depth = 1.0 * c2;
  flat.oscillating_depth = 0.0;
  StepperConfig stepper{2e-7, 2e-4, true};
  const auto out = evolve(basis.negative_mode(9), flat, stepper, PotentialMode::combined);
  const auto coeffs = project_onto_modes(out, basis);
  for (const auto& a : coeffs.positive) CHECK(std::abs(a) < 1e-10);
  CHECK(std::norm(coeffs.negative[9]) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("free evolution keeps a negative mode") {
  const auto basis = build_free_basis(build_grid(1.2, 64), c);
  WellParameters none;
  none.oscillating_depth = 0.0;
  StepperConfig stepper{1e-7, 5e-4, true};
  for (const std::size_t n : {0u, 20u, 32u, 63u}) {
    const auto out = evolve(basis.negative_mode(n), none, stepper, PotentialMode::combined);
    const auto coeffs = project_onto_modes(out, basis);
    for (const auto& a : coeffs.positive) CHECK(std::abs(a) < 1e-10);
    CHECK(std::abs(std::norm(coeffs.negative[n]) - 1.0) < 1e-10);
  }
}

TEST_CASE("evolution is unitary") {
  const auto grid = build_grid(1.2, 64);
  const StepperConfig stepper;
  for (const unsigned seed : {1u, 2u}) {
    const auto field = oracle::random_field(grid, seed);
    const auto out = evolve(field, strong_well(), stepper, PotentialMode::combined);
    CHECK(std::abs(out.norm_squared() - 1.0) < 1e-8);
  }
}

TEST_CASE("halving dt changes the final state by less than 1e-4") {
  const auto basis = build_free_basis(build_grid(1.2, 64), c);
  const auto field = basis.negative_mode(30);
  const auto coarse = evolve(field, strong_well(), StepperConfig{1e-7, 0.002, true}, PotentialMode::combined);
  const auto fine = evolve(field, strong_well(), StepperConfig{5e-8, 0.002, true}, PotentialMode::combined);
  CHECK(max_abs_diff(coarse, fine) < 1e-4);
}

TEST_CASE("second-order convergence in dt") {
  // Short run against a dt/8 reference.
  const auto grid = build_grid(1.2, 64);
  const auto field = oracle::random_field(grid, 9);
  const auto params = strong_well();
  const double T = 4e-5;
  const double dt = 5e-7;
  auto run = [&](double step) { return evolve(field, params, StepperConfig{step, T, true}, PotentialMode::combined); };
  const auto reference = run(dt / 8);
  const double e1 = max_abs_diff(run(dt), reference);
  const double e2 = max_abs_diff(run(dt / 2), reference);
  MESSAGE("error ratio " << e1 / e2);
  CHECK(e1 / e2 == Approx(4.0).epsilon(0.25));
}

TEST_CASE("evolving in two pieces matches one call") {
  const auto grid = build_grid(1.2, 64);
  const auto field = oracle::random_field(grid, 13);
  const StepperConfig stepper{2e-7, 4e-4, true};
  const auto params = strong_well();
  const auto whole = evolve(field, params, stepper, PotentialMode::combined);
  const auto first = evolve(field, params, stepper, PotentialMode::combined, 0.0, 2e-4);
  const auto second = evolve(first, params, stepper, PotentialMode::combined, 2e-4, 4e-4);
  CHECK(whole.max_difference(second) < 1e-10);
}

TEST_CASE("stepper configuration") {
  StepperConfig s{3e-7, 0.002, true};
  CHECK(s.steps() == 6667);
  CHECK(s.effective_step() * 6667 == Approx(0.002).epsilon(1e-15));
  CHECK(StepperConfig{}.steps() == 20000);
  CHECK_THROWS_AS((StepperConfig{0.0, 0.002, true}.validate()), ConfigError);
  CHECK_THROWS_AS((StepperConfig{1e-7, -1.0, true}.validate()), ConfigError);
  CHECK_THROWS_AS((StepperConfig{1.0, 0.002, true}.validate()), ConfigError);
}

TEST_CASE("phase guard") {
  WellParameters p = strong_well();
  CHECK_NOTHROW(check_phase_guard(p, PotentialMode::combined, 1e-7));
  CHECK_NOTHROW(check_phase_guard(p, PotentialMode::combined, 5e-7));
  CHECK_THROWS_AS(check_phase_guard(p, PotentialMode::combined, 1e-6), ConfigError);
  CHECK_NOTHROW(check_phase_guard(p, PotentialMode::oscillating_only, 1e-6 * 0.05 / (1.47 * c2 * 1e-6)));
}

TEST_CASE("batched evolver matches single-field evolution") {
  const auto basis = build_free_basis(build_grid(1.2, 32), c);
  const StepperConfig stepper{2e-7, 2e-4, true};
  const auto params = strong_well();
  SplitStepEvolver evolver(basis.grid(), c, 3);
  std::vector<SpinorField> inputs;
  for (std::size_t col = 0; col < 3; ++col) {
    inputs.push_back(oracle::random_field(basis.grid(), 20 + static_cast<unsigned>(col)));
    const auto [up, lo] = to_momentum(inputs.back());
    for (std::size_t i = 0; i < 32; ++i) {
      const auto slot = basis.grid().fft_slot(basis.grid().wavenumber(i));
      evolver.upper(col)[slot] = up[i];
      evolver.lower(col)[slot] = lo[i];
    }
  }
  SplitStepEvolver::Schedule schedule{params, PotentialMode::combined, 0.0, stepper.effective_step(), stepper.steps(),
                                      stepper.duration, true};
  std::size_t calls = 0;
  const std::vector<std::size_t> checkpoints{500};
  evolver.run(schedule, checkpoints, [&](std::size_t step) {
    ++calls;
    if (step == 500) CHECK(evolver.norm_squared(0) == Approx(1.0).epsilon(1e-12));
  });
  CHECK(calls == 2);
  for (std::size_t col = 0; col < 3; ++col) {
    std::vector<complex> up(32), lo(32);
    for (std::size_t i = 0; i < 32; ++i) {
      const auto slot = basis.grid().fft_slot(basis.grid().wavenumber(i));
      up[i] = evolver.upper(col)[slot];
      lo[i] = evolver.lower(col)[slot];
    }
    const auto batched = from_momentum(basis.grid(), up, lo);
    const auto single = evolve(inputs[col], params, stepper, PotentialMode::combined);
    CHECK(batched.max_difference(single) < 1e-12);
  }
}

}
