#include "cqft/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "cqft/error.hpp"

namespace cqft {

Eigen::MatrixXcd assemble_hamiltonian(double static_depth, const NumericalGrid& grid, const WellParameters& params,
                                      double speed_of_light) {
  if (!(static_depth >= 0.0)) throw ConfigError("static depth must be non-negative");
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double c = speed_of_light;
  const double c2 = c * c;

  // <e_k|V|e_k'> = (1/N) Sum_j V(z_j) exp(-i (p_k - p_k') z_j) depends only on k - k'.
  WellParameters local = params;
  local.static_depth = static_depth;
  std::vector<double> potential(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    potential[j] = potential_at(grid.position(j), 0.0, local, PotentialMode::static_only);
  }
  const auto span = static_cast<std::size_t>(2 * n - 1);
  std::vector<complex> coupling(span);
  const double dp = 2.0 * std::numbers::pi / grid.length();
  for (std::size_t d = 0; d < span; ++d) {
    const double q = dp * (static_cast<double>(d) - static_cast<double>(n - 1));
    complex sum = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) sum += potential[j] * std::polar(1.0, -q * grid.position(j));
    coupling[d] = sum / static_cast<double>(n);
  }

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const complex v = coupling[static_cast<std::size_t>(i - k + n - 1)];
      h(i, k) = v;
      h(n + i, n + k) = v;
    }
    const double p = grid.momentum(static_cast<std::size_t>(i));
    h(i, i) += c2;
    h(n + i, n + i) -= c2;
    h(i, n + i) += c * p;
    h(n + i, i) += c * p;
  }
  const Eigen::MatrixXcd adjoint = h.adjoint();
  return 0.5 * (h + adjoint);
}

namespace {

double localization(const Eigen::VectorXcd& state, const NumericalGrid& grid, const WellParameters& params) {
  const std::size_t n = grid.size();
  std::vector<complex> upper(n), lower(n);
  for (std::size_t i = 0; i < n; ++i) {
    upper[i] = state(static_cast<Eigen::Index>(i));
    lower[i] = state(static_cast<Eigen::Index>(n + i));
  }
  const auto field = from_momentum(grid, upper, lower);
  const double reach = 0.5 * params.width + 10.0 * params.edge_width;
  double inside = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = std::norm(field.upper()[j]) + std::norm(field.lower()[j]);
    total += w;
    if (std::abs(grid.position(j)) <= reach) inside += w;
  }
  return total > 0.0 ? inside / total : 0.0;
}

}  // namespace

std::vector<BoundLevel> bound_levels(double static_depth, const NumericalGrid& grid, const WellParameters& params,
                                     double speed_of_light) {
  const auto h = assemble_hamiltonian(static_depth, grid, params, speed_of_light);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) throw NumericsError("Hermitian eigensolver did not converge");
  const double edge = speed_of_light * speed_of_light * (1.0 - kGapMargin);
  std::vector<BoundLevel> levels;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double e = solver.eigenvalues()(i);
    if (std::abs(e) >= edge) continue;
    Eigen::VectorXcd state = solver.eigenvectors().col(i);
    const double loc = localization(state, grid, params);
    if (loc < kLocalizationThreshold) continue;
    levels.push_back({e, loc, std::move(state)});
  }
  return levels;
}

std::vector<double> bound_spectrum(double static_depth, const NumericalGrid& grid, const WellParameters& params,
                                   double speed_of_light) {
  std::vector<double> energies;
  for (const auto& level : bound_levels(static_depth, grid, params, speed_of_light)) energies.push_back(level.energy);
  return energies;
}

int dived_level_count(double static_depth, const NumericalGrid& grid, const WellParameters& params,
                      double speed_of_light) {
  const auto h = assemble_hamiltonian(static_depth, grid, params, speed_of_light);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericsError("Hermitian eigensolver did not converge");
  const double edge = speed_of_light * speed_of_light * (1.0 - kGapMargin);
  // A positive potential pushes levels up into the upper continuum, a
  // negative one down into the lower continuum.
  const bool upward = params.sign == SignConvention::as_printed;
  int beyond = 0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double e = solver.eigenvalues()(i);
    if (upward ? e > edge : e < -edge) ++beyond;
  }
  return beyond - static_cast<int>(grid.size());
}

double critical_depth(const NumericalGrid& grid, const WellParameters& params, double low, double high,
                      double tolerance, double speed_of_light) {
  if (!(low >= 0.0) || !(high > low)) throw ConfigError("critical-depth bracket must satisfy 0 <= low < high");
  if (!(tolerance > 0.0)) throw ConfigError("critical-depth tolerance must be positive");
  if (dived_level_count(low, grid, params, speed_of_light) > 0 ||
      dived_level_count(high, grid, params, speed_of_light) < 1) {
    throw ConfigError("bracket does not contain the first level crossing");
  }
  while (high - low > tolerance) {
    const double mid = 0.5 * (low + high);
    if (dived_level_count(mid, grid, params, speed_of_light) > 0) {
      high = mid;
    } else {
      low = mid;
    }
  }
  return 0.5 * (low + high);
}

std::vector<SpectrumPoint> spectrum_sweep(const std::vector<double>& depths, const NumericalGrid& grid,
                                          const WellParameters& params, double speed_of_light) {
  std::vector<SpectrumPoint> points;
  std::vector<BoundLevel> previous;
  std::vector<int> previous_ids;
  int next_id = 0;
  for (const double depth : depths) {
    auto levels = bound_levels(depth, grid, params, speed_of_light);
    std::vector<int> ids(levels.size(), -1);
    std::vector<bool> taken(previous.size(), false);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      double best = 0.5;
      std::ptrdiff_t match = -1;
      for (std::size_t j = 0; j < previous.size(); ++j) {
        if (taken[j]) continue;
        const double overlap = std::abs(previous[j].state.dot(levels[i].state));
        if (overlap > best) {
          best = overlap;
          match = static_cast<std::ptrdiff_t>(j);
        }
      }
      if (match >= 0) {
        taken[static_cast<std::size_t>(match)] = true;
        ids[i] = previous_ids[static_cast<std::size_t>(match)];
      } else {
        ids[i] = next_id++;
      }
      points.push_back({depth, ids[i], levels[i].energy});
    }
    previous = std::move(levels);
    previous_ids = std::move(ids);
  }
  return points;
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumPoint>& points, double speed_of_light) {
  const double c2 = speed_of_light * speed_of_light;
  out << "Vs_over_c2,level_index,energy_over_c2\n";
  char line[128];
  for (const auto& point : points) {
    std::snprintf(line, sizeof line, "%.9g,%d,%.9g\n", point.depth / c2, point.level_id, point.energy / c2);
    out << line;
  }
}

}  // namespace cqft
