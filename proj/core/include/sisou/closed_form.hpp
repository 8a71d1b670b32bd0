#pragma once

#include <limits>
#include <optional>

#include "sisou/paths.hpp"

namespace sisou {

/// SIS parameters: population N, initial infecteds i0, transmission beta and
/// the combined recovery + death rate gamma_mu.
class ModelParams {
 public:
  ModelParams(double n, double i0, double beta, double gamma_mu);

  double n() const noexcept { return n_; }
  double i0() const noexcept { return i0_; }
  double beta() const noexcept { return beta_; }
  double gamma_mu() const noexcept { return gamma_mu_; }

  /// nu = beta N - (gamma + mu); sign-equivalent to r0d() - 1.
  double nu() const noexcept { return beta_ * n_ - gamma_mu_; }
  double r0d() const noexcept { return beta_ * n_ / gamma_mu_; }

  ModelParams with_beta(double beta) const { return {n_, i0_, beta, gamma_mu_}; }
  ModelParams with_gamma_mu(double gamma_mu) const { return {n_, i0_, beta_, gamma_mu}; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  double n_;
  double i0_;
  double beta_;
  double gamma_mu_;
};

struct EquilibriumInfo {
  /// Endemic level N (1 - 1/R0), present only when nu > 0.
  std::optional<double> x_star;
};

/// Running log-sum-exp: stores the largest exponent seen and the sum of
/// exp(x - max) so that no term is ever exponentiated at full size.
class LogSumExp {
 public:
  void add(double x) noexcept;
  /// ln(sum exp(x_i)); -inf when nothing has been added.
  double value() const noexcept;

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_sum_ = 0.0;
};

/// Solution of the deterministic SIS equation at time t >= 0. The nu = 0
/// branch uses the analytic limit E(t) = t (series form below |nu| t = 1e-8).
double deterministic_infected(const ModelParams& params, double t);

/// The perturbed solution evaluated node by node from a noise path
/// (kind ou or general_z), with the time integral of exp(nu s + N Y_s) taken
/// by the trapezoidal rule. Everything is carried in log space; results below
/// the smallest normal double are reported as that value, and results are kept
/// strictly below N.
SamplePath perturbed_infected_path(const ModelParams& params, const SamplePath& noise);

/// f(x) = nu - (gamma + mu) x / (N - x) on (0, N).
double f_of_x(const ModelParams& params, double x);

EquilibriumInfo equilibrium(const ModelParams& params);

/// Log-odds G(x) = ln(x / (N - x)) on (0, N).
double g_transform(const ModelParams& params, double x);

/// G^{-1}(y) = N / (1 + exp(-y)), evaluated without overflow for any y.
double g_inverse(const ModelParams& params, double y);

}  // namespace sisou
