#include "sisou/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sisou/error.hpp"
#include "sisou/parallel.hpp"

namespace sisou {
namespace {

SamplePath zero_noise(const TimeGrid& grid) {
  return SamplePath(grid, std::vector<double>(grid.n_nodes(), 0.0), PathKind::kGeneralZ);
}

SamplePath quantile_path(const TimeGrid& grid, const std::vector<std::vector<double>>& paths,
                         double q) {
  std::vector<double> out(grid.n_nodes());
  std::vector<double> column(paths.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t i = 0; i < paths.size(); ++i) column[i] = paths[i][k];
    std::sort(column.begin(), column.end());
    // Linear interpolation between order statistics.
    const double pos = q * static_cast<double>(column.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, column.size() - 1);
    const double w = pos - static_cast<double>(lo);
    out[k] = column[lo] + w * (column[hi] - column[lo]);
  }
  return SamplePath(grid, std::move(out), PathKind::kInfected);
}

}  // namespace

std::string_view to_string(Route r) noexcept {
  switch (r) {
    case Route::kClosedForm: return "closed_form";
    case Route::kItoEm: return "ito_em";
    case Route::kWongZakai: return "wong_zakai";
    case Route::kGray: return "gray";
  }
  return "unknown";
}

std::optional<Route> parse_route(std::string_view name) noexcept {
  for (Route r : {Route::kClosedForm, Route::kItoEm, Route::kWongZakai, Route::kGray}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

void validate(const Scenario& s) {
  const bool ou = std::holds_alternative<OuParams>(s.noise);
  const bool none = std::holds_alternative<NoNoise>(s.noise);
  if (s.route == Route::kWongZakai && !ou) {
    throw std::invalid_argument("route wong_zakai requires OU noise");
  }
  if (s.route == Route::kGray && !(ou || none)) {
    throw std::invalid_argument("route gray requires OU-style noise (sigma only)");
  }
  if (s.wz_refine < 1) throw std::invalid_argument("wz_refine must be >= 1");
  if (const auto* p = std::get_if<OuParams>(&s.noise); p && s.route != Route::kGray) {
    if (!(p->alpha > 0.0) || !(p->sigma >= 0.0)) {
      throw std::invalid_argument("OU noise requires alpha > 0 and sigma >= 0");
    }
  }
  if (!(noise_sigma(s.noise) >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  s.classifier.validate(s.model.n());
  s.integrator.margin_for(s.model.n());
}

std::optional<double> reference_level(const ModelParams& p, const NoiseSpec& noise) {
  if (const auto* lin = std::get_if<LinearDrift>(&noise)) {
    const double nu = p.nu() + p.n() * lin->alpha;
    if (!(nu > 0.0)) return std::nullopt;
    return p.n() * nu / (nu + p.gamma_mu());
  }
  return equilibrium(p).x_star;
}

std::optional<double> reference_level(const Scenario& s) {
  if (s.route == Route::kGray) {
    const double sigma = noise_sigma(s.noise);
    if (sigma == 0.0) return equilibrium(s.model).x_star;
    if (!(r0_stochastic_gray(s.model, sigma) > 1.0)) return std::nullopt;
    const double xi = gray_xi(s.model, sigma);
    if (!std::isfinite(xi)) return std::nullopt;
    return xi;
  }
  return reference_level(s.model, s.noise);
}

SdeRun simulate_path(const Scenario& s, StreamKey key) {
  validate(s);
  const SamplePath b = brownian(s.grid, key);
  switch (s.route) {
    case Route::kClosedForm: {
      if (std::holds_alternative<NoNoise>(s.noise)) {
        std::vector<double> v(s.grid.n_nodes());
        for (std::size_t k = 0; k < v.size(); ++k) {
          v[k] = deterministic_infected(s.model, s.grid.time(k));
        }
        return {SamplePath(s.grid, std::move(v), PathKind::kInfected), zero_noise(s.grid), 0};
      }
      SamplePath noise = std::holds_alternative<OuParams>(s.noise)
                             ? ou_on_increments(s.grid, std::get<OuParams>(s.noise), b)
                             : general_z(s.grid, s.noise, b);
      SamplePath inf = perturbed_infected_path(s.model, noise);
      return {std::move(inf), std::move(noise), 0};
    }
    case Route::kItoEm:
      if (const auto* ou = std::get_if<OuParams>(&s.noise)) {
        return integrate_ou_sis(s.model, *ou, b, s.integrator);
      }
      if (std::holds_alternative<NoNoise>(s.noise)) {
        return integrate_general_z(s.model, LinearDrift{0.0, 0.0}, b, s.integrator);
      }
      return integrate_general_z(s.model, s.noise, b, s.integrator);
    case Route::kWongZakai:
      return integrate_wong_zakai(s.model, std::get<OuParams>(s.noise), b, s.wz_refine,
                                  s.integrator);
    case Route::kGray:
      return integrate_gray(s.model, noise_sigma(s.noise), b, s.integrator);
  }
  throw std::logic_error("simulate_path: unknown route");
}

EnsembleSummary run_ensemble(const Scenario& s, std::size_t n_paths, std::uint64_t seed,
                             const EnsembleOptions& options) {
  if (n_paths < 1) throw std::invalid_argument("run_ensemble: n_paths must be >= 1");
  validate(s);
  EnsembleSummary out;
  out.n_paths = n_paths;
  out.seed = seed;
  out.reference = reference_level(s);
  out.paths.resize(n_paths);
  std::vector<std::vector<double>> stored(options.path_statistics ? n_paths : 0);
  std::optional<TimeGrid> out_grid;

  parallel_for(n_paths, options.threads, [&](std::size_t i) {
    try {
      SdeRun run = simulate_path(s, StreamKey{seed, i});
      PathRecord& rec = out.paths[i];
      rec.stream = i;
      rec.verdict = classify(run.infected, s.model, s.classifier, out.reference);
      rec.noise_average = time_average(run.noise);
      rec.violations = run.violations;
      if (options.path_statistics) {
        stored[i].assign(run.infected.values().begin(), run.infected.values().end());
      }
      if (i == 0) out_grid = run.infected.grid();
    } catch (const std::exception& e) {
      throw PathError(i, e.what());
    }
  });

  std::size_t extinct = 0, persistent = 0;
  double window_sum = 0.0, noise_sum = 0.0;
  for (const PathRecord& rec : out.paths) {
    if (rec.verdict.label == Verdict::kExtinct) ++extinct;
    if (rec.verdict.label == Verdict::kPersistent) ++persistent;
    window_sum += rec.verdict.window_average;
    noise_sum += rec.noise_average;
    out.total_violations += rec.violations;
  }
  const auto n = static_cast<double>(n_paths);
  out.extinct_fraction = static_cast<double>(extinct) / n;
  out.persistent_fraction = static_cast<double>(persistent) / n;
  out.inconclusive_fraction = static_cast<double>(n_paths - extinct - persistent) / n;
  out.mean_time_average_over_window = window_sum / n;
  out.mean_noise_average = noise_sum / n;

  if (options.path_statistics) {
    const TimeGrid& g = *out_grid;
    std::vector<double> mean(g.n_nodes(), 0.0);
    for (const auto& path : stored) {
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += path[k];
    }
    for (double& m : mean) m /= n;
    out.mean_path.emplace(g, std::move(mean), PathKind::kInfected);
    out.q05_path = quantile_path(g, stored, 0.05);
    out.q50_path = quantile_path(g, stored, 0.50);
    out.q95_path = quantile_path(g, stored, 0.95);
  }
  return out;
}

}  // namespace sisou
