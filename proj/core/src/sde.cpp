#include "sisou/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sisou/error.hpp"

namespace sisou {
namespace {

void require_driver(const SamplePath& brownian, const char* what) {
  if (brownian.kind() != PathKind::kBrownian) {
    throw std::invalid_argument(std::string(what) + ": expected a Brownian path");
  }
}

class Projector {
 public:
  Projector(const ModelParams& p, const IntegratorConfig& cfg)
      : n_(p.n()), margin_(cfg.margin_for(p.n())) {}

  double operator()(double raw, std::size_t step, const char* what) {
    if (!std::isfinite(raw)) throw NumericalError(std::string(what) + ": non-finite state", step);
    if (!(raw > 0.0 && raw < n_)) ++violations_;
    return std::clamp(raw, margin_, n_ - margin_);
  }

  std::size_t violations() const noexcept { return violations_; }

 private:
  double n_;
  double margin_;
  std::size_t violations_ = 0;
};

// Shared Euler-Maruyama loop for the perturbed model. `rate(t, z)` is the
// perturbation drift b(t, Z_t); for OU it is -alpha y.
template <typename Rate>
SdeRun euler_perturbed(const ModelParams& p, double sigma, Rate rate, const SamplePath& brownian,
                       const IntegratorConfig& cfg, PathKind noise_kind, const char* what) {
  require_driver(brownian, what);
  if (!(sigma >= 0.0)) throw std::invalid_argument(std::string(what) + ": sigma < 0");
  const TimeGrid& grid = brownian.grid();
  const double dt = grid.dt();
  Projector project(p, cfg);
  std::vector<double> inf(grid.n_nodes());
  std::vector<double> z(grid.n_nodes());
  CoupledState s{p.i0(), 0.0};
  inf[0] = s.i;
  z[0] = s.y;
  for (std::size_t k = 0; k + 1 < inf.size(); ++k) {
    const double db = brownian[k + 1] - brownian[k];
    const double b = rate(grid.time(k), s.y);
    if (!std::isfinite(b)) throw NumericalError(std::string(what) + ": non-finite drift", k);
    const double drift = ito_drift_general(p, sigma, b, s.i);
    const double raw = s.i + drift * dt + perturbation_diffusion(p, sigma, s.i) * db;
    s.y = s.y + b * dt + sigma * db;
    s.i = project(raw, k + 1, what);
    inf[k + 1] = s.i;
    z[k + 1] = s.y;
  }
  return {SamplePath(grid, std::move(inf), PathKind::kInfected),
          SamplePath(grid, std::move(z), noise_kind), project.violations()};
}

}  // namespace

double IntegratorConfig::margin_for(double n) const {
  const double m = margin.value_or(1e-12 * n);
  if (!(m > 0.0 && m < 0.5 * n)) {
    throw std::invalid_argument("IntegratorConfig: margin must lie in (0, N/2)");
  }
  return m;
}

double ito_drift_ou(const ModelParams& p, const OuParams& ou, double i, double y) {
  const double n = p.n();
  const double s2 = ou.sigma * ou.sigma;
  return i * (n - i) * (p.nu() / n - ou.alpha * y + s2 * (n - 2.0 * i) / 2.0) -
         p.gamma_mu() * i * i / n;
}

double ito_drift_general(const ModelParams& p, double sigma, double b, double i) {
  const double n = p.n();
  const double s2 = sigma * sigma;
  return i * (n - i) * (p.nu() / n + b + s2 * n / 2.0 - s2 * i) - p.gamma_mu() * i * i / n;
}

double stratonovich_drift_ou(const ModelParams& p, const OuParams& ou, double i, double y) {
  const double n = p.n();
  return p.beta() * i * (n - i) - p.gamma_mu() * i - ou.alpha * i * (n - i) * y;
}

double stratonovich_correction(const ModelParams& p, double sigma, double i) {
  const double n = p.n();
  if (!(i > 0.0 && i < n)) {
    throw std::invalid_argument("stratonovich_correction: i must lie in (0, N)");
  }
  return 0.5 * sigma * sigma * i * (n - i) * (n - 2.0 * i);
}

double perturbation_diffusion(const ModelParams& p, double sigma, double i) {
  return sigma * i * (p.n() - i);
}

double gray_drift(const ModelParams& p, double i) {
  return p.beta() * i * (p.n() - i) - p.gamma_mu() * i;
}

double gray_xi(const ModelParams& p, double sigma) {
  const double s2 = sigma * sigma;
  const double disc = p.beta() * p.beta() - 2.0 * s2 * p.gamma_mu();
  if (disc < 0.0 || s2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (std::sqrt(disc) - (p.beta() - s2 * p.n())) / s2;
}

SdeRun integrate_ou_sis(const ModelParams& p, const OuParams& ou, const SamplePath& brownian,
                        const IntegratorConfig& cfg) {
  const double alpha = ou.alpha;
  return euler_perturbed(
      p, ou.sigma, [alpha](double, double y) { return -alpha * y; }, brownian, cfg, PathKind::kOu,
      "integrate_ou_sis");
}

SdeRun integrate_general_z(const ModelParams& p, const NoiseSpec& spec,
                           const SamplePath& brownian, const IntegratorConfig& cfg) {
  if (const auto* lin = std::get_if<LinearDrift>(&spec)) {
    // Z is advanced as alpha t + sigma B exactly, matching general_z().
    require_driver(brownian, "integrate_general_z");
    const TimeGrid& grid = brownian.grid();
    const double dt = grid.dt();
    const double sigma = lin->sigma;
    if (!(sigma >= 0.0)) throw std::invalid_argument("integrate_general_z: sigma < 0");
    Projector project(p, cfg);
    std::vector<double> inf(grid.n_nodes());
    inf[0] = p.i0();
    for (std::size_t k = 0; k + 1 < inf.size(); ++k) {
      const double i = inf[k];
      const double raw = i + ito_drift_general(p, sigma, lin->alpha, i) * dt +
                         perturbation_diffusion(p, sigma, i) * (brownian[k + 1] - brownian[k]);
      inf[k + 1] = project(raw, k + 1, "integrate_general_z");
    }
    return {SamplePath(grid, std::move(inf), PathKind::kInfected),
            general_z(grid, spec, brownian), project.violations()};
  }
  if (const auto* gen = std::get_if<GeneralDrift>(&spec)) {
    if (!gen->b) throw std::invalid_argument("integrate_general_z: drift function is empty");
    return euler_perturbed(p, gen->sigma, gen->b, brownian, cfg, PathKind::kGeneralZ,
                           "integrate_general_z");
  }
  throw std::invalid_argument("integrate_general_z: spec must be LinearDrift or GeneralDrift");
}

SdeRun integrate_gray(const ModelParams& p, double sigma, const SamplePath& brownian,
                      const IntegratorConfig& cfg) {
  require_driver(brownian, "integrate_gray");
  if (!(sigma >= 0.0)) throw std::invalid_argument("integrate_gray: sigma < 0");
  const TimeGrid& grid = brownian.grid();
  const double dt = grid.dt();
  Projector project(p, cfg);
  std::vector<double> inf(grid.n_nodes());
  inf[0] = p.i0();
  for (std::size_t k = 0; k + 1 < inf.size(); ++k) {
    const double i = inf[k];
    const double raw = i + gray_drift(p, i) * dt +
                       perturbation_diffusion(p, sigma, i) * (brownian[k + 1] - brownian[k]);
    inf[k + 1] = project(raw, k + 1, "integrate_gray");
  }
  return {SamplePath(grid, std::move(inf), PathKind::kInfected), brownian, project.violations()};
}

SdeRun integrate_wong_zakai(const ModelParams& p, const OuParams& ou, const SamplePath& brownian,
                            std::size_t refine_factor, const IntegratorConfig& cfg) {
  require_driver(brownian, "integrate_wong_zakai");
  if (refine_factor < 1) throw std::invalid_argument("integrate_wong_zakai: refine_factor < 1");
  if (cfg.rk4_substeps < 1) throw std::invalid_argument("integrate_wong_zakai: rk4_substeps < 1");
  const TimeGrid& coarse = brownian.grid();
  const TimeGrid out_grid = coarse.refined(refine_factor);
  const std::size_t substeps = cfg.rk4_substeps;
  const double h = coarse.dt() / static_cast<double>(refine_factor * substeps);
  const double n = p.n();
  Projector project(p, cfg);

  std::vector<double> inf(out_grid.n_nodes());
  std::vector<double> y(out_grid.n_nodes());
  CoupledState s{p.i0(), 0.0};
  inf[0] = s.i;
  y[0] = s.y;

  for (std::size_t seg = 0; seg < coarse.n_steps(); ++seg) {
    const double slope = (brownian[seg + 1] - brownian[seg]) / coarse.dt();
    const double forcing = ou.sigma * slope;
    auto rhs = [&](const CoupledState& x) {
      const double logistic = x.i * (n - x.i);
      return CoupledState{p.beta() * logistic - p.gamma_mu() * x.i -
                              ou.alpha * logistic * x.y + forcing * logistic,
                          -ou.alpha * x.y + forcing};
    };
    for (std::size_t r = 0; r < refine_factor; ++r) {
      for (std::size_t m = 0; m < substeps; ++m) {
        const CoupledState k1 = rhs(s);
        const CoupledState k2 = rhs({s.i + 0.5 * h * k1.i, s.y + 0.5 * h * k1.y});
        const CoupledState k3 = rhs({s.i + 0.5 * h * k2.i, s.y + 0.5 * h * k2.y});
        const CoupledState k4 = rhs({s.i + h * k3.i, s.y + h * k3.y});
        const double raw = s.i + (h / 6.0) * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i);
        s.y = s.y + (h / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
        const std::size_t node = seg * refine_factor + r + 1;
        if (!std::isfinite(s.y)) throw NumericalError("integrate_wong_zakai: non-finite state", node);
        s.i = project(raw, node, "integrate_wong_zakai");
      }
      const std::size_t node = seg * refine_factor + r + 1;
      inf[node] = s.i;
      y[node] = s.y;
    }
  }
  return {SamplePath(out_grid, std::move(inf), PathKind::kInfected),
          SamplePath(out_grid, std::move(y), PathKind::kWzSmoothed), project.violations()};
}

}  // namespace sisou
