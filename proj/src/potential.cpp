#include "cqft/potential.hpp"

#include <cmath>

#include "cqft/error.hpp"

namespace cqft {

std::string_view to_string(WellShape shape) { return shape == WellShape::well ? "well" : "step"; }

std::string_view to_string(SignConvention sign) {
  return sign == SignConvention::as_printed ? "as_printed" : "negated";
}

std::string_view to_string(PotentialMode mode) {
  switch (mode) {
    case PotentialMode::combined:
      return "combined";
    case PotentialMode::static_only:
      return "static_only";
    case PotentialMode::oscillating_only:
      return "oscillating_only";
  }
  return "combined";
}

WellShape parse_well_shape(std::string_view text) {
  if (text == "well") return WellShape::well;
  if (text == "step") return WellShape::step;
  throw ConfigError("unknown well shape '" + std::string(text) + "' (expected well|step)");
}

SignConvention parse_sign_convention(std::string_view text) {
  if (text == "as_printed") return SignConvention::as_printed;
  if (text == "negated") return SignConvention::negated;
  throw ConfigError("unknown sign convention '" + std::string(text) + "' (expected as_printed|negated)");
}

PotentialMode parse_potential_mode(std::string_view text) {
  if (text == "combined") return PotentialMode::combined;
  if (text == "static_only" || text == "static") return PotentialMode::static_only;
  if (text == "oscillating_only" || text == "oscillating") return PotentialMode::oscillating_only;
  throw ConfigError("unknown potential mode '" + std::string(text) +
                    "' (expected combined|static_only|oscillating_only)");
}

void WellParameters::validate() const {
  if (!(width > 0.0)) throw ConfigError("well width D must be positive");
  if (!(edge_width > 0.0)) throw ConfigError("edge width W must be positive");
  if (!(oscillating_depth >= 0.0)) throw ConfigError("oscillating depth V_o must be non-negative");
  if (!(static_depth >= 0.0)) throw ConfigError("static depth V_s must be non-negative");
  if (!(frequency >= 0.0)) throw ConfigError("frequency must be non-negative");
}

double WellParameters::static_coefficient(PotentialMode mode) const {
  if (mode == PotentialMode::oscillating_only) return 0.0;
  return sign_factor() * static_depth;
}

double WellParameters::oscillating_coefficient(double t, PotentialMode mode) const {
  if (mode == PotentialMode::static_only) return 0.0;
  return sign_factor() * (oscillating_depth * std::sin(frequency * t));
}

double WellParameters::max_abs_potential(PotentialMode mode) const {
  switch (mode) {
    case PotentialMode::combined:
      return static_depth + oscillating_depth;
    case PotentialMode::static_only:
      return static_depth;
    case PotentialMode::oscillating_only:
      return oscillating_depth;
  }
  return 0.0;
}

double sauter_shape(double z, const WellParameters& params) {
  const double half = 0.5 * params.width;
  const double w = params.edge_width;
  if (params.shape == WellShape::step) {
    return 0.5 * (std::tanh((z - half) / w) + std::tanh((z + half) / w));
  }
  return 0.5 * (std::tanh((z + half) / w) - std::tanh((z - half) / w));
}

double potential_at(double z, double t, const WellParameters& params, PotentialMode mode, double switch_off) {
  if (t < 0.0 || t > switch_off) return 0.0;
  const double shape = sauter_shape(z, params);
  return params.static_coefficient(mode) * shape + params.oscillating_coefficient(t, mode) * shape;
}

}  // namespace cqft
