#pragma once

#include <cstddef>
#include <optional>

#include "sisou/closed_form.hpp"
#include "sisou/paths.hpp"

namespace sisou {

enum class BoundaryPolicy {
  /// A raw step leaving (0, N) is counted and moved to [margin, N - margin].
  kProjectWithMargin,
};

struct IntegratorConfig {
  BoundaryPolicy boundary = BoundaryPolicy::kProjectWithMargin;
  /// Absolute margin; defaults to 1e-12 N. Must lie in (0, N/2).
  std::optional<double> margin;
  /// RK4 steps per output interval of the smoothed (Wong-Zakai) ODE.
  std::size_t rk4_substeps = 8;

  double margin_for(double n) const;
};

/// The pair (infected, perturbation) advanced together.
struct CoupledState {
  double i = 0.0;
  double y = 0.0;
};

struct SdeRun {
  SamplePath infected;
  SamplePath noise;
  /// Raw steps that left (0, N) before projection.
  std::size_t violations = 0;
};

// Drift and diffusion coefficients -----------------------------------------

/// Ito drift of the OU-perturbed system:
/// i (N - i) (nu/N - alpha y + sigma^2 (N - 2i)/2) - (gamma+mu) i^2 / N.
double ito_drift_ou(const ModelParams& p, const OuParams& ou, double i, double y);

/// Ito drift for a general perturbation with drift value b = b(t, Z_t):
/// i (N - i) (nu/N + b + sigma^2 N/2 - sigma^2 i) - (gamma+mu) i^2 / N.
double ito_drift_general(const ModelParams& p, double sigma, double b, double i);

/// Drift of the Stratonovich form reached by the Wong-Zakai limit:
/// beta i (N - i) - (gamma+mu) i - alpha i (N - i) y.
double stratonovich_drift_ou(const ModelParams& p, const OuParams& ou, double i, double y);

/// Ito minus Stratonovich drift: (sigma^2 / 2) i (N - i) (N - 2i). Requires 0 < i < N.
double stratonovich_correction(const ModelParams& p, double sigma, double i);

/// sigma i (N - i), shared by every route.
double perturbation_diffusion(const ModelParams& p, double sigma, double i);

/// Drift of the Gray et al. comparison SDE: beta i (N - i) - (gamma+mu) i.
double gray_drift(const ModelParams& p, double i);

/// Persistence level xi of the Gray model; NaN when beta^2 < 2 sigma^2 (gamma+mu).
double gray_xi(const ModelParams& p, double sigma);

// Integrators ---------------------------------------------------------------

/// Euler-Maruyama on the coupled (infected, OU) system, one shared Brownian
/// driving both components. The OU component is bit-identical to
/// ou_on_increments() on the same path.
SdeRun integrate_ou_sis(const ModelParams& p, const OuParams& ou, const SamplePath& brownian,
                        const IntegratorConfig& cfg = {});

/// Euler-Maruyama on the Gray et al. SDE. `noise` in the result is the
/// driving Brownian path.
SdeRun integrate_gray(const ModelParams& p, double sigma, const SamplePath& brownian,
                      const IntegratorConfig& cfg = {});

/// Euler-Maruyama on the general-perturbation system. Z follows general_z()
/// exactly; for LinearDrift b(t, z) = alpha.
SdeRun integrate_general_z(const ModelParams& p, const NoiseSpec& spec,
                           const SamplePath& brownian, const IntegratorConfig& cfg = {});

/// Smoothed random ODE driven by the polygonal interpolation of `brownian`
/// (its nodes are the partition). Output lives on brownian.grid() refined by
/// `refine_factor`; each output interval takes cfg.rk4_substeps RK4 steps.
/// The returned noise path is the smoothed OU process (kind wz_smoothed).
SdeRun integrate_wong_zakai(const ModelParams& p, const OuParams& ou, const SamplePath& brownian,
                            std::size_t refine_factor = 1, const IntegratorConfig& cfg = {});

}  // namespace sisou
