#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "sisou/rng.hpp"

namespace sisou {

/// Uniform discretization of [0, t_end] into n_steps intervals.
///
/// Node k sits at k * t_end / n_steps, computed directly so the last node is
/// exactly t_end and no rounding accumulates along the grid.
class TimeGrid {
 public:
  TimeGrid(double t_end, std::size_t n_steps);

  /// Grid with step `dt`; t_end / dt must be an integer to within 1e-9 relative.
  static TimeGrid with_step(double t_end, double dt);

  double t_end() const noexcept { return t_end_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t n_nodes() const noexcept { return n_steps_ + 1; }
  double dt() const noexcept { return t_end_ / static_cast<double>(n_steps_); }
  double time(std::size_t k) const noexcept {
    return static_cast<double>(k) * t_end_ / static_cast<double>(n_steps_);
  }

  TimeGrid refined(std::size_t factor) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t_end_;
  std::size_t n_steps_;
};

enum class PathKind { kBrownian, kOu, kGeneralZ, kInfected, kWzSmoothed };

std::string_view to_string(PathKind kind) noexcept;

/// One realization of a process on a grid: one value per node.
class SamplePath {
 public:
  SamplePath(TimeGrid grid, std::vector<double> values, PathKind kind);

  const TimeGrid& grid() const noexcept { return grid_; }
  PathKind kind() const noexcept { return kind_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  double front() const noexcept { return values_.front(); }
  double back() const noexcept { return values_.back(); }

 private:
  TimeGrid grid_;
  std::vector<double> values_;
  PathKind kind_;
};

/// Mean-reverting OU perturbation dY = -alpha Y dt + sigma dB.
struct OuParams {
  double alpha = 0.0;
  double sigma = 0.0;
};

struct NoNoise {};

/// Z_t = alpha t + sigma B_t.
struct LinearDrift {
  double alpha = 0.0;
  double sigma = 0.0;
};

/// dZ = b(t, Z) dt + sigma dB with constant sigma.
struct GeneralDrift {
  std::function<double(double t, double z)> b;
  double sigma = 0.0;
};

using NoiseSpec = std::variant<NoNoise, OuParams, LinearDrift, GeneralDrift>;

/// Diffusion intensity of any noise spec (0 for NoNoise).
double noise_sigma(const NoiseSpec& spec) noexcept;

/// Standard Brownian motion with B_0 = 0; increments N(0, dt).
SamplePath brownian(const TimeGrid& grid, StreamKey key);

/// OU path driven by the given Brownian increments (Euler-Maruyama),
/// Y_{k+1} = Y_k + (-alpha Y_k) dt + sigma dB_k, Y_0 = 0.
///
/// Shares its recursion with general_z() for b(t, z) = -alpha z, so both
/// produce bit-identical values on the same increments.
SamplePath ou_on_increments(const TimeGrid& grid, const OuParams& params,
                            const SamplePath& brownian);

/// OU path sampled with the exact Gaussian transition. Requires alpha > 0.
SamplePath ou_exact(const TimeGrid& grid, const OuParams& params, StreamKey key);

/// General perturbation path. LinearDrift is evaluated exactly at the nodes;
/// GeneralDrift is integrated by Euler-Maruyama on the Brownian increments.
SamplePath general_z(const TimeGrid& grid, const NoiseSpec& spec, const SamplePath& brownian);

/// Piecewise-linear interpolation onto a grid `factor` times finer. Original
/// nodes are copied exactly.
SamplePath polygonal_refine(const SamplePath& path, std::size_t factor);

/// Keeps every `factor`-th node. For a Brownian path this is the same
/// Brownian motion observed on the coarser grid.
SamplePath subsample(const SamplePath& path, std::size_t factor);

/// Trapezoidal estimate of (1/T) * integral of the path over [0, T].
double time_average(const SamplePath& path);

/// Trapezoidal time average restricted to nodes k >= first.
double time_average(const SamplePath& path, std::size_t first);

}  // namespace sisou
