#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace cqft {

using complex = std::complex<double>;

/// Speed of light in atomic units.
inline constexpr double kSpeedOfLight = 137.036;

/// Periodic position grid z_j = -L/2 + j*dz and its conjugate momenta
/// p_k = 2*pi*k/L, k in [-N/2, N/2). Momentum index i maps to k = i - N/2.
class NumericalGrid {
 public:
  NumericalGrid(double length, std::size_t points);

  double length() const { return length_; }
  std::size_t size() const { return points_; }
  double spacing() const { return length_ / static_cast<double>(points_); }

  double position(std::size_t j) const;
  std::vector<double> positions() const;

  int wavenumber(std::size_t i) const { return static_cast<int>(i) - static_cast<int>(points_ / 2); }
  double momentum(std::size_t i) const;
  std::vector<double> momenta() const;

  /// Slot of wavenumber k in FFT (0, 1, ..., N/2-1, -N/2, ..., -1) order.
  std::size_t fft_slot(int k) const;

  bool operator==(const NumericalGrid&) const = default;

 private:
  double length_;
  std::size_t points_;
};

NumericalGrid build_grid(double length, std::size_t points);

/// Two-component spinor sampled on a grid. Storage is all upper values
/// followed by all lower values.
class SpinorField {
 public:
  explicit SpinorField(const NumericalGrid& grid);

  const NumericalGrid& grid() const { return grid_; }

  std::span<complex> upper() { return {values_.data(), grid_.size()}; }
  std::span<complex> lower() { return {values_.data() + grid_.size(), grid_.size()}; }
  std::span<const complex> upper() const { return {values_.data(), grid_.size()}; }
  std::span<const complex> lower() const { return {values_.data() + grid_.size(), grid_.size()}; }

  /// Sum_j |psi_j|^2 dz.
  double norm_squared() const;

  /// Largest pointwise component difference.
  double max_difference(const SpinorField& other) const;

 private:
  NumericalGrid grid_;
  std::vector<complex> values_;
};

/// Field-free plane-wave mode at one grid momentum. Positive spinor (a, b)
/// with energy +E, negative spinor (-b, a) with energy -E.
struct FreeMode {
  std::size_t index;  // momentum index on the grid (natural order)
  int wavenumber;
  double momentum;
  double energy;
  double a;
  double b;
};

class FreeModeBasis {
 public:
  FreeModeBasis(const NumericalGrid& grid, double speed_of_light, std::optional<double> energy_cutoff);

  const NumericalGrid& grid() const { return grid_; }
  double speed_of_light() const { return c_; }
  std::optional<double> energy_cutoff() const { return cutoff_; }

  std::span<const FreeMode> modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  bool truncated() const { return modes_.size() != grid_.size(); }

  /// Retained-mode position of a grid momentum index, if retained.
  std::optional<std::size_t> find(std::size_t momentum_index) const;

  SpinorField positive_mode(std::size_t m) const;
  SpinorField negative_mode(std::size_t m) const;

 private:
  NumericalGrid grid_;
  double c_;
  std::optional<double> cutoff_;
  std::vector<FreeMode> modes_;
  std::vector<std::ptrdiff_t> lookup_;
};

FreeModeBasis build_free_basis(const NumericalGrid& grid, double speed_of_light = kSpeedOfLight,
                               std::optional<double> energy_cutoff = std::nullopt);

/// Free Dirac Hamiltonian c*sigma_1*p + sigma_3*c^2 as a row-major 2x2 block.
struct DiracBlock {
  double h00, h01, h11;
};
DiracBlock free_hamiltonian(double momentum, double speed_of_light);

/// Overlaps with the retained free modes: positive[m] = <u_m|field>,
/// negative[m] = <v_m|field>.
struct ModeCoefficients {
  std::vector<complex> positive;
  std::vector<complex> negative;
};

ModeCoefficients project_onto_modes(const SpinorField& field, const FreeModeBasis& basis);

/// Inverse of project_onto_modes on the span of the retained modes.
SpinorField synthesize(const ModeCoefficients& coefficients, const FreeModeBasis& basis);

/// Spectral coefficients psi~_k (natural momentum order) of a field, with
/// psi(z_j) = L^{-1/2} Sum_k psi~_k exp(i p_k z_j). Returns {upper, lower}.
std::pair<std::vector<complex>, std::vector<complex>> to_momentum(const SpinorField& field);
SpinorField from_momentum(const NumericalGrid& grid, std::span<const complex> upper,
                          std::span<const complex> lower);

}  // namespace cqft
