#include "cqft/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cqft/error.hpp"
#include "cqft/fourier.hpp"

namespace cqft {

NumericalGrid::NumericalGrid(double length, std::size_t points) : length_(length), points_(points) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError("grid length must be positive, got " + std::to_string(length));
  }
  if (points < 8 || points % 2 != 0) {
    throw ConfigError("grid point count must be even and >= 8, got " + std::to_string(points));
  }
}

double NumericalGrid::position(std::size_t j) const {
  return -0.5 * length_ + static_cast<double>(j) * spacing();
}

std::vector<double> NumericalGrid::positions() const {
  std::vector<double> z(points_);
  for (std::size_t j = 0; j < points_; ++j) z[j] = position(j);
  return z;
}

double NumericalGrid::momentum(std::size_t i) const {
  return 2.0 * std::numbers::pi * wavenumber(i) / length_;
}

std::vector<double> NumericalGrid::momenta() const {
  std::vector<double> p(points_);
  for (std::size_t i = 0; i < points_; ++i) p[i] = momentum(i);
  return p;
}

std::size_t NumericalGrid::fft_slot(int k) const {
  const auto n = static_cast<int>(points_);
  return static_cast<std::size_t>(((k % n) + n) % n);
}

NumericalGrid build_grid(double length, std::size_t points) { return NumericalGrid(length, points); }

SpinorField::SpinorField(const NumericalGrid& grid) : grid_(grid), values_(2 * grid.size()) {}

double SpinorField::norm_squared() const {
  double sum = 0.0;
  for (const auto& v : values_) sum += std::norm(v);
  return sum * grid_.spacing();
}

double SpinorField::max_difference(const SpinorField& other) const {
  if (!(grid_ == other.grid_)) throw ConfigError("spinor fields live on different grids");
  double worst = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) worst = std::max(worst, std::abs(values_[i] - other.values_[i]));
  return worst;
}

DiracBlock free_hamiltonian(double momentum, double speed_of_light) {
  const double c2 = speed_of_light * speed_of_light;
  return {c2, speed_of_light * momentum, -c2};
}

FreeModeBasis::FreeModeBasis(const NumericalGrid& grid, double speed_of_light, std::optional<double> energy_cutoff)
    : grid_(grid), c_(speed_of_light), cutoff_(energy_cutoff), lookup_(grid.size(), -1) {
  if (!(speed_of_light > 0.0)) throw ConfigError("speed of light must be positive");
  const double c2 = c_ * c_;
  if (cutoff_ && !(*cutoff_ >= c2)) throw ConfigError("energy cutoff must be at least c^2");

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = grid.momentum(i);
    const double energy = std::sqrt(c2 * c2 + c2 * p * p);
    if (cutoff_ && energy > *cutoff_) continue;
    FreeMode mode{};
    mode.index = i;
    mode.wavenumber = grid.wavenumber(i);
    mode.momentum = p;
    mode.energy = energy;
    mode.a = std::sqrt((energy + c2) / (2.0 * energy));
    mode.b = c_ * p / std::sqrt(2.0 * energy * (energy + c2));
    lookup_[i] = static_cast<std::ptrdiff_t>(modes_.size());
    modes_.push_back(mode);
  }
}

std::optional<std::size_t> FreeModeBasis::find(std::size_t momentum_index) const {
  if (momentum_index >= lookup_.size() || lookup_[momentum_index] < 0) return std::nullopt;
  return static_cast<std::size_t>(lookup_[momentum_index]);
}

namespace {

SpinorField plane_wave(const NumericalGrid& grid, double p, double upper, double lower) {
  SpinorField field(grid);
  const double amplitude = 1.0 / std::sqrt(grid.length());
  auto up = field.upper();
  auto lo = field.lower();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const complex phase = std::polar(amplitude, p * grid.position(j));
    up[j] = upper * phase;
    lo[j] = lower * phase;
  }
  return field;
}

}  // namespace

SpinorField FreeModeBasis::positive_mode(std::size_t m) const {
  const auto& mode = modes_.at(m);
  return plane_wave(grid_, mode.momentum, mode.a, mode.b);
}

SpinorField FreeModeBasis::negative_mode(std::size_t m) const {
  const auto& mode = modes_.at(m);
  return plane_wave(grid_, mode.momentum, -mode.b, mode.a);
}

FreeModeBasis build_free_basis(const NumericalGrid& grid, double speed_of_light, std::optional<double> energy_cutoff) {
  return FreeModeBasis(grid, speed_of_light, energy_cutoff);
}

// Position index j sits at slot (j + N/2) mod N of the transform buffer, so
// that slot r carries z = r*dz (wrapped) and the DFT phase needs no shift.
std::pair<std::vector<complex>, std::vector<complex>> to_momentum(const SpinorField& field) {
  const auto& grid = field.grid();
  const std::size_t n = grid.size();
  FourierBatch fft(n, 2);
  auto up = fft.row(0);
  auto lo = fft.row(1);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t r = (j + n / 2) % n;
    up[r] = field.upper()[j];
    lo[r] = field.lower()[j];
  }
  fft.forward();
  const double scale = std::sqrt(grid.length()) / static_cast<double>(n);
  std::vector<complex> upper(n), lower(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t slot = grid.fft_slot(grid.wavenumber(i));
    upper[i] = up[slot] * scale;
    lower[i] = lo[slot] * scale;
  }
  return {std::move(upper), std::move(lower)};
}

SpinorField from_momentum(const NumericalGrid& grid, std::span<const complex> upper, std::span<const complex> lower) {
  const std::size_t n = grid.size();
  if (upper.size() != n || lower.size() != n) throw ConfigError("spectral coefficient count does not match grid");
  FourierBatch fft(n, 2);
  auto up = fft.row(0);
  auto lo = fft.row(1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t slot = grid.fft_slot(grid.wavenumber(i));
    up[slot] = upper[i];
    lo[slot] = lower[i];
  }
  fft.backward();
  const double scale = 1.0 / std::sqrt(grid.length());
  SpinorField field(grid);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t r = (j + n / 2) % n;
    field.upper()[j] = up[r] * scale;
    field.lower()[j] = lo[r] * scale;
  }
  return field;
}

ModeCoefficients project_onto_modes(const SpinorField& field, const FreeModeBasis& basis) {
  if (!(field.grid() == basis.grid())) throw ConfigError("field and basis use different grids");
  const auto [upper, lower] = to_momentum(field);
  ModeCoefficients out;
  out.positive.resize(basis.size());
  out.negative.resize(basis.size());
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const auto& mode = basis.modes()[m];
    const complex x = upper[mode.index];
    const complex y = lower[mode.index];
    out.positive[m] = mode.a * x + mode.b * y;
    out.negative[m] = -mode.b * x + mode.a * y;
  }
  return out;
}

SpinorField synthesize(const ModeCoefficients& coefficients, const FreeModeBasis& basis) {
  if (coefficients.positive.size() != basis.size() || coefficients.negative.size() != basis.size()) {
    throw ConfigError("coefficient count does not match basis");
  }
  const std::size_t n = basis.grid().size();
  std::vector<complex> upper(n), lower(n);
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const auto& mode = basis.modes()[m];
    const complex plus = coefficients.positive[m];
    const complex minus = coefficients.negative[m];
    upper[mode.index] = mode.a * plus - mode.b * minus;
    lower[mode.index] = mode.b * plus + mode.a * minus;
  }
  return from_momentum(basis.grid(), upper, lower);
}

}  // namespace cqft
