#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

#include "cqft/grid.hpp"
#include "cqft/potential.hpp"

namespace cqft {

/// Levels within c^2 (1 - kGapMargin) of zero count as inside the mass gap.
inline constexpr double kGapMargin = 1e-6;

/// Fraction of an eigenvector's norm that must sit within |z| <= D/2 + 10W
/// for it to count as a bound level.
inline constexpr double kLocalizationThreshold = 0.9;

/// Static Dirac Hamiltonian c sigma_1 p + sigma_3 c^2 + V_s S(z) in the
/// plane-wave basis of `grid`. Rows 0..N-1 are the upper component and
/// N..2N-1 the lower one, both in natural momentum order. The potential uses
/// the shape and sign convention of `params`; its depth is `static_depth`.
Eigen::MatrixXcd assemble_hamiltonian(double static_depth, const NumericalGrid& grid, const WellParameters& params,
                                      double speed_of_light = kSpeedOfLight);

struct BoundLevel {
  double energy;
  double localization;
  Eigen::VectorXcd state;  // plane-wave coefficients, same layout as the Hamiltonian
};

/// Localized eigenstates inside the gap, ascending in energy.
std::vector<BoundLevel> bound_levels(double static_depth, const NumericalGrid& grid, const WellParameters& params,
                                     double speed_of_light = kSpeedOfLight);

/// Energies of bound_levels().
std::vector<double> bound_spectrum(double static_depth, const NumericalGrid& grid, const WellParameters& params,
                                   double speed_of_light = kSpeedOfLight);

/// Number of levels that have crossed the far gap edge at this depth. It is
/// non-decreasing in depth since every eigenvalue moves monotonically with it.
int dived_level_count(double static_depth, const NumericalGrid& grid, const WellParameters& params,
                      double speed_of_light = kSpeedOfLight);

/// Depth where the deepest bound level first reaches the opposite continuum,
/// by bisection on dived_level_count() within [low, high].
double critical_depth(const NumericalGrid& grid, const WellParameters& params, double low, double high,
                      double tolerance, double speed_of_light = kSpeedOfLight);

struct SpectrumPoint {
  double depth;
  int level_id;
  double energy;
};

/// Bound levels over a list of depths. Level ids follow a level from one
/// depth to the next by maximal eigenvector overlap.
std::vector<SpectrumPoint> spectrum_sweep(const std::vector<double>& depths, const NumericalGrid& grid,
                                          const WellParameters& params, double speed_of_light = kSpeedOfLight);

/// CSV with header `Vs_over_c2,level_index,energy_over_c2`.
void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumPoint>& points,
                        double speed_of_light = kSpeedOfLight);

}  // namespace cqft
