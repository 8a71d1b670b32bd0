#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sisou/cli/config.hpp"
#include "sisou/convergence.hpp"
#include "sisou/ensemble.hpp"

namespace sisou::cli {

// All writers expect a config passed through resolve_defaults().

/// Header `t,infected[,noise]`, one row per output node of path `cfg.stream`.
void write_simulation(const RunConfig& cfg, std::ostream& out);

/// Header `t,infected` from the deterministic solution on the grid.
void write_deterministic(const RunConfig& cfg, std::ostream& out);

/// Columns: seed,stream,label,terminal,crossings,up_crossings,down_crossings,
/// slope,window_average,noise_average,violations.
void write_ensemble_paths(const EnsembleSummary& e, std::ostream& out);

/// Columns: t,mean,q05,q50,q95.
void write_ensemble_quantiles(const EnsembleSummary& e, std::ostream& out);

/// `key: value` lines.
std::string ensemble_summary_text(const RunConfig& cfg, const EnsembleSummary& e);

/// Columns: dt,median_error,median_violation_rate,slope.
void write_convergence(const ConvergenceTable& t, std::ostream& out);
std::string convergence_summary_text(const RunConfig& cfg, const ConvergenceTable& t);

struct FigurePanel {
  std::string name;
  RunConfig config;
};

/// Panels of figure 2..6 built on `base` (seed, dt, paths, route and the
/// classifier settings are taken from base; model and noise from the figure).
/// Throws ConfigError for any other id.
std::vector<FigurePanel> figure_panels(int id, const RunConfig& base);

/// Writes fig<id>_<panel>.csv for each panel and fig<id>_params.txt into
/// `dir`; returns the written paths.
std::vector<std::filesystem::path> write_figure(int id, const RunConfig& base,
                                                const std::filesystem::path& dir,
                                                std::size_t threads);

/// Entry point shared by the executable and in-process callers. `args`
/// excludes the program name. Returns 0 on success, 2 on configuration
/// errors, 1 on runtime errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sisou::cli
