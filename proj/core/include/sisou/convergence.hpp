#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sisou/ensemble.hpp"

namespace sisou {

struct ConvergenceRow {
  double dt = 0.0;
  /// Median over seeds of the max-node |route - closed form|.
  double median_error = 0.0;
  /// Median over seeds of violations / n_steps.
  double median_violation_rate = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log(median_error) against log(dt).
  double slope = 0.0;
  double reference_dt = 0.0;
};

/// Strong-error study of the scenario's route (ito_em or wong_zakai) against
/// the closed form on shared noise.
///
/// Per seed, one Brownian path is drawn on a reference grid four times finer
/// than the finest dt; the closed form on that grid is the reference solution.
/// Each coarser run is driven by the same Brownian observed at its own nodes
/// (for wong_zakai, those nodes form the polygonal partition). `dt_list` must be
/// strictly decreasing, have at least 4 entries, and every entry must divide
/// the horizon s.grid.t_end() and be an integer multiple of the reference step.
ConvergenceTable convergence_study(const Scenario& s, std::span<const double> dt_list,
                                   std::size_t n_seeds, std::uint64_t seed,
                                   std::size_t threads = 0);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace sisou
