#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cqft/error.hpp"
#include "cqft/grid.hpp"
#include "oracles.hpp"

using namespace cqft;
using doctest::Approx;

namespace {
constexpr double c = kSpeedOfLight;
}

TEST_SUITE("grid") {

TEST_CASE("default grid spacing and momentum range") {
  const auto grid = build_grid(1.2, 256);
  CHECK(grid.spacing() == Approx(0.0046875).epsilon(1e-15));
  CHECK(grid.spacing() * 256 == Approx(1.2).epsilon(1e-15));
  const auto p = grid.momenta();
  CHECK(p.front() == Approx(-std::numbers::pi * 256 / 1.2).epsilon(1e-14));
  CHECK(p.front() == Approx(-670.2).epsilon(1e-4));
  CHECK(p.back() == Approx(2 * std::numbers::pi * 127 / 1.2).epsilon(1e-14));
  CHECK(grid.position(0) == Approx(-0.6));
  CHECK(grid.position(255) == Approx(0.6 - 0.0046875));
}

TEST_CASE("eight-point grid has integer wavenumbers -4..3") {
  const auto grid = build_grid(1.2, 8);
  const auto p = grid.momenta();
  REQUIRE(p.size() == 8);
  for (int k = -4; k < 4; ++k) CHECK(p[static_cast<std::size_t>(k + 4)] == Approx(k * 2 * std::numbers::pi / 1.2));
  CHECK(grid.fft_slot(0) == 0);
  CHECK(grid.fft_slot(3) == 3);
  CHECK(grid.fft_slot(-4) == 4);
  CHECK(grid.fft_slot(-1) == 7);
}

TEST_CASE("invalid grids are rejected") {
  CHECK_THROWS_AS(build_grid(1.2, 257), ConfigError);
  CHECK_THROWS_AS(build_grid(1.2, 6), ConfigError);
  CHECK_THROWS_AS(build_grid(1.2, 0), ConfigError);
  CHECK_THROWS_AS(build_grid(0.0, 256), ConfigError);
  CHECK_THROWS_AS(build_grid(-1.0, 256), ConfigError);
}

TEST_CASE("rest-frame spinors") {
  const auto basis = build_free_basis(build_grid(1.2, 16), c);
  const auto m = basis.find(8).value();  // k = 0
  const auto& mode = basis.modes()[m];
  CHECK(mode.momentum == 0.0);
  CHECK(mode.a == 1.0);
  CHECK(mode.b == 0.0);
  CHECK(mode.energy == Approx(c * c));
  const auto u = basis.positive_mode(m);
  const auto v = basis.negative_mode(m);
  for (std::size_t j = 0; j < 16; ++j) {
    CHECK(std::abs(u.upper()[j] - 1.0 / std::sqrt(1.2)) < 1e-14);
    CHECK(std::abs(u.lower()[j]) < 1e-14);
    CHECK(std::abs(v.upper()[j]) < 1e-14);
    CHECK(std::abs(v.lower()[j] - 1.0 / std::sqrt(1.2)) < 1e-14);
  }
}

TEST_CASE("spinor at p = c matches the closed form") {
  // With L = 2 pi / c the first positive wavenumber has p = c exactly.
  const auto grid = build_grid(2 * std::numbers::pi / c, 8);
  const auto basis = build_free_basis(grid, c);
  const auto& mode = basis.modes()[basis.find(5).value()];
  REQUIRE(mode.momentum == Approx(c).epsilon(1e-14));
  const double r2 = std::sqrt(2.0);
  CHECK(mode.energy == Approx(c * c * r2).epsilon(1e-14));
  CHECK(mode.a == Approx(std::sqrt((r2 + 1) / (2 * r2))).epsilon(1e-14));
  CHECK(mode.b == Approx(std::sqrt((r2 - 1) / (2 * r2))).epsilon(1e-14));
  CHECK(mode.a * mode.a + mode.b * mode.b == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("free modes are normalized eigenvectors of H0") {
  const auto basis = build_free_basis(build_grid(1.2, 256), c);
  for (const auto& mode : basis.modes()) {
    CHECK(std::abs(mode.a * mode.a + mode.b * mode.b - 1.0) < 1e-12);
    CHECK(mode.energy == Approx(oracle::energy(mode.momentum, c)).epsilon(1e-14));
    CHECK(mode.energy >= c * c);
    if (mode.momentum != 0.0) CHECK(mode.energy > c * c);
    const auto h = free_hamiltonian(mode.momentum, c);
    const double scale = mode.energy;
    // H (a, b) = +E (a, b)
    CHECK(std::abs(h.h00 * mode.a + h.h01 * mode.b - mode.energy * mode.a) < 1e-12 * scale);
    CHECK(std::abs(h.h01 * mode.a + h.h11 * mode.b - mode.energy * mode.b) < 1e-12 * scale);
    // H (-b, a) = -E (-b, a)
    CHECK(std::abs(-h.h00 * mode.b + h.h01 * mode.a - mode.energy * mode.b) < 1e-12 * scale);
    CHECK(std::abs(-h.h01 * mode.b + h.h11 * mode.a + mode.energy * mode.a) < 1e-12 * scale);
  }
}

TEST_CASE("modes are orthonormal on the grid") {
  const auto grid = build_grid(1.2, 16);
  const auto basis = build_free_basis(grid, c);
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const auto u = basis.positive_mode(m);
    const auto v = basis.negative_mode(m);
    for (std::size_t q = 0; q < basis.size(); ++q) {
      const double p = basis.modes()[q].momentum;
      const complex uu = oracle::overlap(u, p, c, true);
      const complex vu = oracle::overlap(u, p, c, false);
      const complex vv = oracle::overlap(v, p, c, false);
      CHECK(std::abs(uu - (m == q ? 1.0 : 0.0)) < 1e-12);
      CHECK(std::abs(vv - (m == q ? 1.0 : 0.0)) < 1e-12);
      CHECK(std::abs(vu) < 1e-12);
    }
  }
}

TEST_CASE("projection of a single mode") {
  const auto basis = build_free_basis(build_grid(1.2, 32), c);
  const std::size_t q = 21;
  const auto coeffs = project_onto_modes(basis.positive_mode(q), basis);
  for (std::size_t m = 0; m < basis.size(); ++m) {
    CHECK(std::abs(coeffs.positive[m] - (m == q ? 1.0 : 0.0)) < 1e-12);
    CHECK(std::abs(coeffs.negative[m]) < 1e-12);
  }

  auto mix = basis.positive_mode(q);
  const auto v = basis.negative_mode(q);
  for (std::size_t j = 0; j < 32; ++j) {
    mix.upper()[j] = (mix.upper()[j] + v.upper()[j]) / std::sqrt(2.0);
    mix.lower()[j] = (mix.lower()[j] + v.lower()[j]) / std::sqrt(2.0);
  }
  const auto half = project_onto_modes(mix, basis);
  CHECK(std::norm(half.positive[q]) == Approx(0.5).epsilon(1e-12));
  CHECK(std::norm(half.negative[q]) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("projection agrees with direct summation and satisfies Parseval") {
  const auto grid = build_grid(1.2, 64);
  const auto basis = build_free_basis(grid, c);
  const auto field = oracle::random_field(grid, 7);
  const auto coeffs = project_onto_modes(field, basis);
  double total = 0.0;
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const double p = basis.modes()[m].momentum;
    CHECK(std::abs(coeffs.positive[m] - oracle::overlap(field, p, c, true)) < 1e-12);
    CHECK(std::abs(coeffs.negative[m] - oracle::overlap(field, p, c, false)) < 1e-12);
    total += std::norm(coeffs.positive[m]) + std::norm(coeffs.negative[m]);
  }
  CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("synthesize inverts projection without cutoff") {
  const auto grid = build_grid(1.2, 128);
  const auto basis = build_free_basis(grid, c);
  for (unsigned seed = 1; seed <= 3; ++seed) {
    const auto field = oracle::random_field(grid, seed);
    const auto back = synthesize(project_onto_modes(field, basis), basis);
    CHECK(field.max_difference(back) < 1e-10);
  }
}

TEST_CASE("basis completeness by explicit mode sum") {
  // Sum_p [u_p u_p^dagger + v_p v_p^dagger] applied to a random vector,
  // assembled mode by mode from the oracle overlaps.
  const auto grid = build_grid(1.2, 16);
  const auto basis = build_free_basis(grid, c);
  const auto field = oracle::random_field(grid, 11);
  SpinorField sum(grid);
  for (const auto& mode : basis.modes()) {
    const complex cp = oracle::overlap(field, mode.momentum, c, true);
    const complex cn = oracle::overlap(field, mode.momentum, c, false);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const complex w = oracle::plane_wave(grid, mode.momentum, j);
      sum.upper()[j] += w * (cp * mode.a - cn * mode.b);
      sum.lower()[j] += w * (cp * mode.b + cn * mode.a);
    }
  }
  CHECK(field.max_difference(sum) < 1e-10);
}

TEST_CASE("momentum transform round trip") {
  const auto grid = build_grid(1.2, 32);
  const auto field = oracle::random_field(grid, 3);
  const auto [up, lo] = to_momentum(field);
  const auto back = from_momentum(grid, up, lo);
  CHECK(field.max_difference(back) < 1e-13);
}

TEST_CASE("energy cutoff drops high modes") {
  const auto grid = build_grid(1.2, 64);
  const double cutoff = 1.01 * c * c;
  const auto basis = build_free_basis(grid, c, cutoff);
  CHECK(basis.truncated());
  CHECK(basis.size() < 64);
  std::size_t expected = 0;
  for (const double p : grid.momenta()) expected += oracle::energy(p, c) <= cutoff ? 1 : 0;
  CHECK(basis.size() == expected);
  for (const auto& mode : basis.modes()) CHECK(mode.energy <= cutoff);
  CHECK_FALSE(basis.find(0).has_value());
  CHECK_THROWS_AS(build_free_basis(grid, c, 0.5 * c * c), ConfigError);
  CHECK_THROWS_AS(build_free_basis(grid, -1.0), ConfigError);
  CHECK_FALSE(build_free_basis(grid, c).truncated());
}

TEST_CASE("projection rejects a field from another grid") {
  const auto basis = build_free_basis(build_grid(1.2, 32), c);
  const SpinorField other(build_grid(1.2, 64));
  CHECK_THROWS_AS(project_onto_modes(other, basis), ConfigError);
}

}
