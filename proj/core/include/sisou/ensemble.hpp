#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sisou/analysis.hpp"
#include "sisou/closed_form.hpp"
#include "sisou/paths.hpp"
#include "sisou/sde.hpp"

namespace sisou {

/// How an infected trajectory is produced from a noise realization.
enum class Route { kClosedForm, kItoEm, kWongZakai, kGray };

std::string_view to_string(Route r) noexcept;
std::optional<Route> parse_route(std::string_view name) noexcept;

/// Everything needed to produce one trajectory except the random stream.
struct Scenario {
  ModelParams model;
  NoiseSpec noise = NoNoise{};
  Route route = Route::kClosedForm;
  TimeGrid grid;
  ClassifierConfig classifier{};
  IntegratorConfig integrator{};
  /// Output refinement of the Wong-Zakai route (output grid = grid refined).
  std::size_t wz_refine = 1;
};

/// Throws std::invalid_argument when route and noise are incompatible:
/// gray needs OU (alpha ignored) or no noise; wong_zakai needs OU.
void validate(const Scenario& s);

/// Level the classifier tests crossings against. For LinearDrift the long-run
/// rate Z_t / t = alpha shifts beta to beta + alpha, so the endemic level of
/// the shifted model is used; otherwise x* of the base model.
std::optional<double> reference_level(const ModelParams& p, const NoiseSpec& noise);

/// reference_level() for the scenario's route; the gray route uses the Gray
/// persistence level xi when R0^S > 1.
std::optional<double> reference_level(const Scenario& s);

/// One trajectory for the given stream. For every route the driving Brownian
/// path is brownian(grid, key), so routes are coupled pathwise.
SdeRun simulate_path(const Scenario& s, StreamKey key);

struct PathRecord {
  std::uint64_t stream = 0;
  TrajectoryVerdict verdict;
  /// Time average of the noise path over the whole horizon.
  double noise_average = 0.0;
  std::size_t violations = 0;
};

struct EnsembleOptions {
  /// Worker threads; 0 uses std::thread::hardware_concurrency().
  std::size_t threads = 0;
  /// Keep mean and quantile paths (needs n_paths * n_nodes doubles).
  bool path_statistics = true;
};

struct EnsembleSummary {
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  double extinct_fraction = 0.0;
  double persistent_fraction = 0.0;
  double inconclusive_fraction = 0.0;
  std::optional<double> reference;
  /// Mean over paths of the trailing-window time average of I.
  double mean_time_average_over_window = 0.0;
  /// Mean over paths of the noise time average (ergodic diagnostic for OU).
  double mean_noise_average = 0.0;
  std::size_t total_violations = 0;
  std::optional<SamplePath> mean_path;
  std::optional<SamplePath> q05_path;
  std::optional<SamplePath> q50_path;
  std::optional<SamplePath> q95_path;
  std::vector<PathRecord> paths;
};

/// Path i uses StreamKey{seed, i}. Results are independent of thread count.
EnsembleSummary run_ensemble(const Scenario& s, std::size_t n_paths, std::uint64_t seed,
                             const EnsembleOptions& options = {});

}  // namespace sisou
