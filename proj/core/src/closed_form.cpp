#include "sisou/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sisou/error.hpp"

namespace sisou {

ModelParams::ModelParams(double n, double i0, double beta, double gamma_mu)
    : n_(n), i0_(i0), beta_(beta), gamma_mu_(gamma_mu) {
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("ModelParams: N must be > 0");
  if (!(i0 > 0.0 && i0 < n)) throw std::invalid_argument("ModelParams: i0 must lie in (0, N)");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("ModelParams: beta must be > 0");
  }
  if (!(gamma_mu > 0.0) || !std::isfinite(gamma_mu)) {
    throw std::invalid_argument("ModelParams: gamma_mu must be > 0");
  }
}

void LogSumExp::add(double x) noexcept {
  if (x == -std::numeric_limits<double>::infinity()) return;
  if (x > max_) {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - x) + 1.0;
    max_ = x;
  } else {
    scaled_sum_ += std::exp(x - max_);
  }
}

double LogSumExp::value() const noexcept {
  if (scaled_sum_ == 0.0) return -std::numeric_limits<double>::infinity();
  return max_ + std::log(scaled_sum_);
}

double deterministic_infected(const ModelParams& p, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("deterministic_infected: t must be >= 0");
  const double nu = p.nu();
  const double x = nu * t;
  if (std::abs(x) < 1e-8) {
    // E(t) = (e^{nu t} - 1) / nu = t (1 + nu t / 2 + ...)
    const double e = t * (1.0 + 0.5 * x);
    return p.i0() * std::exp(x) / (1.0 + p.beta() * p.i0() * e);
  }
  if (x > 0.0) {
    // Divide through by e^{nu t} so large nu t cannot overflow.
    const double e_scaled = -std::expm1(-x) / nu;
    return p.i0() / (std::exp(-x) + p.beta() * p.i0() * e_scaled);
  }
  const double e = std::expm1(x) / nu;
  return p.i0() * std::exp(x) / (1.0 + p.beta() * p.i0() * e);
}

SamplePath perturbed_infected_path(const ModelParams& p, const SamplePath& noise) {
  if (noise.kind() != PathKind::kOu && noise.kind() != PathKind::kGeneralZ) {
    throw std::invalid_argument("perturbed_infected_path: noise must be an ou or general_z path");
  }
  const TimeGrid& grid = noise.grid();
  const double n = p.n();
  const double i0 = p.i0();
  const double nu = p.nu();
  const double log_half_dt = std::log(0.5 * grid.dt());
  const double log_susceptible0 = std::log(n - i0);
  const double log_i0 = std::log(i0);
  const double log_i0_gm = std::log(i0 * p.gamma_mu());
  const double log_n_i0 = std::log(n * i0);
  const double floor = std::numeric_limits<double>::min();
  const double ceiling = std::nextafter(n, 0.0);

  std::vector<double> out(grid.n_nodes());
  out[0] = i0;
  LogSumExp integral;
  double prev_exponent = 0.0;
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (!std::isfinite(noise[k])) {
      throw NumericalError("perturbed_infected_path: non-finite noise value", k);
    }
    const double exponent = nu * grid.time(k) + n * noise[k];
    // Trapezoid (dt/2)(e^{L_{k-1}} + e^{L_k}), added as two log terms.
    integral.add(log_half_dt + prev_exponent);
    integral.add(log_half_dt + exponent);
    prev_exponent = exponent;

    LogSumExp denominator;
    denominator.add(log_susceptible0);
    denominator.add(log_i0 + exponent);
    denominator.add(log_i0_gm + integral.value());
    out[k] = std::clamp(std::exp(log_n_i0 + exponent - denominator.value()), floor, ceiling);
  }
  return SamplePath(grid, std::move(out), PathKind::kInfected);
}

double f_of_x(const ModelParams& p, double x) {
  if (!(x > 0.0 && x < p.n())) throw std::invalid_argument("f_of_x: x must lie in (0, N)");
  return p.nu() - p.gamma_mu() * x / (p.n() - x);
}

EquilibriumInfo equilibrium(const ModelParams& p) {
  const double nu = p.nu();
  if (!(nu > 0.0)) return {};
  return {p.n() * nu / (nu + p.gamma_mu())};
}

double g_transform(const ModelParams& p, double x) {
  if (!(x > 0.0 && x < p.n())) throw std::invalid_argument("g_transform: x must lie in (0, N)");
  return std::log(x) - std::log(p.n() - x);
}

double g_inverse(const ModelParams& p, double y) {
  if (y >= 0.0) return p.n() / (1.0 + std::exp(-y));
  const double e = std::exp(y);
  return p.n() * e / (1.0 + e);
}

}  // namespace sisou
