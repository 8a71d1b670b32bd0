#include "sisou/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sisou {

double r0_deterministic(const ModelParams& p) { return p.r0d(); }

double r0_stochastic_gray(const ModelParams& p, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("r0_stochastic_gray: sigma < 0");
  const double n = p.n();
  return p.r0d() - sigma * sigma * n * n / (2.0 * p.gamma_mu());
}

bool gray_extinction_condition(const ModelParams& p, double sigma) {
  const double s2 = sigma * sigma;
  const double b_over_n = p.beta() / p.n();
  const double second = p.beta() * p.beta() / (2.0 * p.gamma_mu());
  return (r0_stochastic_gray(p, sigma) < 1.0 && s2 < b_over_n) || s2 > std::max(b_over_n, second);
}

double log_odds_slope(const SamplePath& infected, const ModelParams& p) {
  if (infected.kind() != PathKind::kInfected) {
    throw std::invalid_argument("log_odds_slope: expected an infected path");
  }
  return g_transform(p, infected.back()) / infected.grid().t_end();
}

double ergodic_diagnostic(const SamplePath& ou_path) { return time_average(ou_path); }

void ClassifierConfig::validate(double n) const {
  if (!(eps_for(n) > 0.0)) throw std::invalid_argument("ClassifierConfig: eps_extinct must be > 0");
  if (!(window_fraction > 0.0 && window_fraction < 1.0)) {
    throw std::invalid_argument("ClassifierConfig: window_fraction must lie in (0, 1)");
  }
  if (min_crossings < 1) throw std::invalid_argument("ClassifierConfig: min_crossings must be >= 1");
  if (!(hysteresis >= 0.0)) throw std::invalid_argument("ClassifierConfig: hysteresis < 0");
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::kExtinct: return "extinct";
    case Verdict::kPersistent: return "persistent";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

CrossingCount count_crossings(const SamplePath& path, double level, double band,
                              std::size_t first) {
  CrossingCount c;
  int side = 0;  // -1 below band, +1 above band, 0 not yet known
  for (std::size_t k = first; k < path.size(); ++k) {
    const double v = path[k];
    int now = 0;
    if (v > level + band) now = 1;
    else if (v < level - band) now = -1;
    if (now == 0) continue;
    if (side != 0 && now != side) {
      if (now > 0) ++c.up;
      else ++c.down;
    }
    side = now;
  }
  return c;
}

std::size_t window_start(const TimeGrid& grid, double window_fraction) {
  const double start = (1.0 - window_fraction) * static_cast<double>(grid.n_steps());
  const auto k = static_cast<std::size_t>(std::ceil(start));
  return std::min(k, grid.n_steps() - 1);
}

TrajectoryVerdict classify(const SamplePath& infected, const ModelParams& p,
                           const ClassifierConfig& cfg) {
  return classify(infected, p, cfg, equilibrium(p).x_star);
}

TrajectoryVerdict classify(const SamplePath& infected, const ModelParams& p,
                           const ClassifierConfig& cfg, std::optional<double> reference) {
  cfg.validate(p.n());
  TrajectoryVerdict v;
  const std::size_t first = window_start(infected.grid(), cfg.window_fraction);
  v.terminal_value = infected.back();
  v.window_average = time_average(infected, first);
  v.slope_estimate = log_odds_slope(infected, p);
  if (reference) {
    const CrossingCount c = count_crossings(infected, *reference, cfg.hysteresis * p.n(), first);
    v.up_crossings = c.up;
    v.down_crossings = c.down;
    v.crossings = c.total();
  }
  if (v.terminal_value < cfg.eps_for(p.n())) {
    v.label = Verdict::kExtinct;
  } else if (reference && v.crossings >= cfg.min_crossings) {
    v.label = Verdict::kPersistent;
  } else {
    v.label = Verdict::kInconclusive;
  }
  return v;
}

}  // namespace sisou
