#include "sisou/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sisou/error.hpp"
#include "sisou/parallel.hpp"

namespace sisou {
namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

SamplePath reference_solution(const Scenario& s, const SamplePath& fine_b) {
  const TimeGrid& g = fine_b.grid();
  if (std::holds_alternative<NoNoise>(s.noise)) {
    std::vector<double> v(g.n_nodes());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = deterministic_infected(s.model, g.time(k));
    return SamplePath(g, std::move(v), PathKind::kInfected);
  }
  if (const auto* ou = std::get_if<OuParams>(&s.noise)) {
    return perturbed_infected_path(s.model, ou_on_increments(g, *ou, fine_b));
  }
  return perturbed_infected_path(s.model, general_z(g, s.noise, fine_b));
}

SdeRun coarse_run(const Scenario& s, const SamplePath& coarse_b) {
  if (s.route == Route::kWongZakai) {
    return integrate_wong_zakai(s.model, std::get<OuParams>(s.noise), coarse_b, 1, s.integrator);
  }
  if (const auto* ou = std::get_if<OuParams>(&s.noise)) {
    return integrate_ou_sis(s.model, *ou, coarse_b, s.integrator);
  }
  if (std::holds_alternative<NoNoise>(s.noise)) {
    return integrate_general_z(s.model, LinearDrift{0.0, 0.0}, coarse_b, s.integrator);
  }
  return integrate_general_z(s.model, s.noise, coarse_b, s.integrator);
}

}  // namespace

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("log_log_slope: need at least two matching points");
  }
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const auto n = static_cast<double>(x.size());
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ConvergenceTable convergence_study(const Scenario& s, std::span<const double> dt_list,
                                   std::size_t n_seeds, std::uint64_t seed, std::size_t threads) {
  validate(s);
  if (s.route != Route::kItoEm && s.route != Route::kWongZakai) {
    throw std::invalid_argument("convergence_study: route must be ito_em or wong_zakai");
  }
  if (dt_list.size() < 4) throw std::invalid_argument("convergence_study: need >= 4 dt values");
  if (n_seeds < 1) throw std::invalid_argument("convergence_study: n_seeds must be >= 1");
  for (std::size_t j = 1; j < dt_list.size(); ++j) {
    if (!(dt_list[j] < dt_list[j - 1])) {
      throw std::invalid_argument("convergence_study: dt_list must be strictly decreasing");
    }
  }
  const double t_end = s.grid.t_end();
  const TimeGrid fine = TimeGrid::with_step(t_end, dt_list.back() / 4.0);
  std::vector<std::size_t> factors;
  for (double dt : dt_list) {
    const TimeGrid g = TimeGrid::with_step(t_end, dt);
    if (fine.n_steps() % g.n_steps() != 0) {
      throw std::invalid_argument("convergence_study: dt is not a multiple of the reference step");
    }
    factors.push_back(fine.n_steps() / g.n_steps());
  }

  std::vector<std::vector<double>> errors(dt_list.size(), std::vector<double>(n_seeds));
  std::vector<std::vector<double>> rates(dt_list.size(), std::vector<double>(n_seeds));
  parallel_for(n_seeds, threads, [&](std::size_t i) {
    try {
      const SamplePath fine_b = brownian(fine, StreamKey{seed, i});
      const SamplePath ref = reference_solution(s, fine_b);
      for (std::size_t j = 0; j < dt_list.size(); ++j) {
        const std::size_t f = factors[j];
        const SdeRun run = coarse_run(s, subsample(fine_b, f));
        double err = 0.0;
        for (std::size_t k = 0; k < run.infected.size(); ++k) {
          err = std::max(err, std::abs(run.infected[k] - ref[k * f]));
        }
        errors[j][i] = err;
        rates[j][i] = static_cast<double>(run.violations) /
                      static_cast<double>(run.infected.grid().n_steps());
      }
    } catch (const std::exception& e) {
      throw PathError(i, e.what());
    }
  });

  ConvergenceTable table;
  table.reference_dt = fine.dt();
  std::vector<double> dts, meds;
  for (std::size_t j = 0; j < dt_list.size(); ++j) {
    ConvergenceRow row{dt_list[j], median(errors[j]), median(rates[j])};
    table.rows.push_back(row);
    dts.push_back(row.dt);
    meds.push_back(row.median_error);
  }
  table.slope = log_log_slope(dts, meds);
  return table;
}

}  // namespace sisou
