#pragma once

#include <limits>
#include <string>
#include <string_view>

#include "cqft/grid.hpp"

namespace cqft {

/// `well` is the localized difference of tanh edges; `step` is the literal
/// sum form, a monotone ramp from -1 to +1 kept for comparison.
enum class WellShape { well, step };

/// Global sign applied to the potential: +1 for as_printed, -1 for negated.
enum class SignConvention { as_printed, negated };

/// Which terms of V(z,t) = (V_s + V_o sin(wt)) S(z) act during a run.
enum class PotentialMode { combined, static_only, oscillating_only };

std::string_view to_string(WellShape shape);
std::string_view to_string(SignConvention sign);
std::string_view to_string(PotentialMode mode);
WellShape parse_well_shape(std::string_view text);
SignConvention parse_sign_convention(std::string_view text);
PotentialMode parse_potential_mode(std::string_view text);

/// Physical knobs of the combined Sauter well, all in atomic units.
struct WellParameters {
  double static_depth = 0.0;
  double oscillating_depth = 1.47 * kSpeedOfLight * kSpeedOfLight;
  double frequency = 1.5 * kSpeedOfLight * kSpeedOfLight;
  double width = 10.0 / kSpeedOfLight;
  double edge_width = 0.3 / kSpeedOfLight;
  WellShape shape = WellShape::well;
  SignConvention sign = SignConvention::as_printed;

  void validate() const;

  double sign_factor() const { return sign == SignConvention::as_printed ? 1.0 : -1.0; }

  /// Signed coefficients of S(z) from the static and the oscillating term.
  /// V(z,t) is evaluated as static_coefficient*S + oscillating_coefficient*S
  /// everywhere, so combined equals the sum of the single-term modes exactly.
  double static_coefficient(PotentialMode mode) const;
  double oscillating_coefficient(double t, PotentialMode mode) const;

  /// Upper bound on |V(z,t)| over all z and t for the given mode.
  double max_abs_potential(PotentialMode mode) const;
};

/// Dimensionless Sauter profile S(z).
double sauter_shape(double z, const WellParameters& params);

/// V(z,t) for the chosen mode. The field is switched on abruptly at t = 0 and
/// off at t = switch_off; outside that window the potential vanishes.
double potential_at(double z, double t, const WellParameters& params, PotentialMode mode,
                    double switch_off = std::numeric_limits<double>::infinity());

}  // namespace cqft
