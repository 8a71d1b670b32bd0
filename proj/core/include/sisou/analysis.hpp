#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "sisou/closed_form.hpp"
#include "sisou/paths.hpp"

namespace sisou {

double r0_deterministic(const ModelParams& p);

/// R0^S = R0^D - sigma^2 N^2 / (2 (gamma + mu)) of the Gray et al. model.
double r0_stochastic_gray(const ModelParams& p, double sigma);

/// Either sufficient extinction condition of the Gray et al. model:
/// (R0^S < 1 and sigma^2 < beta/N) or sigma^2 > max(beta/N, beta^2 / (2 (gamma+mu))).
bool gray_extinction_condition(const ModelParams& p, double sigma);

/// (1/T) G(I_T): finite-horizon proxy for limsup (1/t) G(I_t).
double log_odds_slope(const SamplePath& infected, const ModelParams& p);

/// Time average of an OU path; tends to 0 almost surely.
double ergodic_diagnostic(const SamplePath& ou_path);

/// Finite-horizon extinction / persistence proxy.
struct ClassifierConfig {
  /// Terminal value below which a path is extinct; defaults to 1e-3 N.
  std::optional<double> eps_extinct;
  /// Trailing fraction of the horizon in which crossings are counted.
  double window_fraction = 0.5;
  std::size_t min_crossings = 4;
  /// Half-width of the hysteresis band around the reference level, as a fraction of N.
  double hysteresis = 0.02;

  void validate(double n) const;
  double eps_for(double n) const { return eps_extinct.value_or(1e-3 * n); }
};

enum class Verdict { kExtinct, kPersistent, kInconclusive };

std::string_view to_string(Verdict v) noexcept;

struct TrajectoryVerdict {
  Verdict label = Verdict::kInconclusive;
  double terminal_value = 0.0;
  /// Band-to-band crossings of the reference level inside the window.
  std::size_t crossings = 0;
  std::size_t up_crossings = 0;
  std::size_t down_crossings = 0;
  double slope_estimate = 0.0;
  /// Time average of the path over the window.
  double window_average = 0.0;
};

/// Counts crossings of `level` with a +-band hysteresis over nodes k >= first.
/// A crossing is registered when the path moves from strictly below
/// level - band to strictly above level + band, or back.
struct CrossingCount {
  std::size_t up = 0;
  std::size_t down = 0;
  std::size_t total() const noexcept { return up + down; }
};
CrossingCount count_crossings(const SamplePath& path, double level, double band,
                              std::size_t first = 0);

/// First node index of the trailing window.
std::size_t window_start(const TimeGrid& grid, double window_fraction);

/// Classifies against the endemic level x* of `p` (persistence only when nu > 0).
TrajectoryVerdict classify(const SamplePath& infected, const ModelParams& p,
                           const ClassifierConfig& cfg = {});

/// Same rule with an explicit reference level; no persistence verdict when
/// `reference` is empty.
TrajectoryVerdict classify(const SamplePath& infected, const ModelParams& p,
                           const ClassifierConfig& cfg, std::optional<double> reference);

}  // namespace sisou
