#include "sisou/paths.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sisou/error.hpp"

namespace sisou {
namespace {

void require_same_grid(const TimeGrid& grid, const SamplePath& path, const char* what) {
  if (!(path.grid() == grid)) {
    throw std::invalid_argument(std::string(what) + ": path grid does not match target grid");
  }
}

void require_brownian(const SamplePath& path, const char* what) {
  if (path.kind() != PathKind::kBrownian) {
    throw std::invalid_argument(std::string(what) + ": expected a Brownian path");
  }
}

}  // namespace

TimeGrid::TimeGrid(double t_end, std::size_t n_steps) : t_end_(t_end), n_steps_(n_steps) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("TimeGrid: t_end must be positive and finite");
  }
  if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
}

TimeGrid TimeGrid::with_step(double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("TimeGrid: dt must be positive and finite");
  }
  const double ratio = t_end / dt;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * n) {
    throw std::invalid_argument("TimeGrid: t_end is not an integer multiple of dt");
  }
  return TimeGrid(t_end, static_cast<std::size_t>(n));
}

TimeGrid TimeGrid::refined(std::size_t factor) const {
  if (factor < 1) throw std::invalid_argument("TimeGrid: refinement factor must be >= 1");
  return TimeGrid(t_end_, n_steps_ * factor);
}

std::string_view to_string(PathKind kind) noexcept {
  switch (kind) {
    case PathKind::kBrownian: return "brownian";
    case PathKind::kOu: return "ou";
    case PathKind::kGeneralZ: return "general_z";
    case PathKind::kInfected: return "infected";
    case PathKind::kWzSmoothed: return "wz_smoothed";
  }
  return "unknown";
}

SamplePath::SamplePath(TimeGrid grid, std::vector<double> values, PathKind kind)
    : grid_(grid), values_(std::move(values)), kind_(kind) {
  if (values_.size() != grid_.n_nodes()) {
    throw std::invalid_argument("SamplePath: value count differs from grid node count");
  }
  const bool starts_at_zero =
      kind_ == PathKind::kBrownian || kind_ == PathKind::kOu || kind_ == PathKind::kGeneralZ;
  if (starts_at_zero && values_.front() != 0.0) {
    throw std::invalid_argument("SamplePath: noise paths must start at 0");
  }
}

double noise_sigma(const NoiseSpec& spec) noexcept {
  struct Visitor {
    double operator()(const NoNoise&) const { return 0.0; }
    double operator()(const OuParams& p) const { return p.sigma; }
    double operator()(const LinearDrift& p) const { return p.sigma; }
    double operator()(const GeneralDrift& p) const { return p.sigma; }
  };
  return std::visit(Visitor{}, spec);
}

SamplePath brownian(const TimeGrid& grid, StreamKey key) {
  NormalStream rng(key);
  const double scale = std::sqrt(grid.dt());
  std::vector<double> b(grid.n_nodes());
  b[0] = 0.0;
  for (std::size_t k = 1; k < b.size(); ++k) b[k] = b[k - 1] + scale * rng.normal();
  return SamplePath(grid, std::move(b), PathKind::kBrownian);
}

SamplePath ou_on_increments(const TimeGrid& grid, const OuParams& params,
                            const SamplePath& brownian) {
  require_same_grid(grid, brownian, "ou_on_increments");
  require_brownian(brownian, "ou_on_increments");
  if (!(params.sigma >= 0.0)) throw std::invalid_argument("ou_on_increments: sigma < 0");
  const double dt = grid.dt();
  std::vector<double> y(grid.n_nodes());
  y[0] = 0.0;
  for (std::size_t k = 0; k + 1 < y.size(); ++k) {
    const double drift = -params.alpha * y[k];
    y[k + 1] = y[k] + drift * dt + params.sigma * (brownian[k + 1] - brownian[k]);
  }
  return SamplePath(grid, std::move(y), PathKind::kOu);
}

SamplePath ou_exact(const TimeGrid& grid, const OuParams& params, StreamKey key) {
  if (!(params.alpha > 0.0)) throw std::invalid_argument("ou_exact: alpha must be > 0");
  if (!(params.sigma >= 0.0)) throw std::invalid_argument("ou_exact: sigma < 0");
  const double dt = grid.dt();
  const double decay = std::exp(-params.alpha * dt);
  const double sd = params.sigma * std::sqrt(-std::expm1(-2.0 * params.alpha * dt) /
                                             (2.0 * params.alpha));
  NormalStream rng(key);
  std::vector<double> y(grid.n_nodes());
  y[0] = 0.0;
  for (std::size_t k = 0; k + 1 < y.size(); ++k) y[k + 1] = y[k] * decay + sd * rng.normal();
  return SamplePath(grid, std::move(y), PathKind::kOu);
}

SamplePath general_z(const TimeGrid& grid, const NoiseSpec& spec, const SamplePath& brownian) {
  require_same_grid(grid, brownian, "general_z");
  require_brownian(brownian, "general_z");
  std::vector<double> z(grid.n_nodes());
  z[0] = 0.0;
  if (const auto* lin = std::get_if<LinearDrift>(&spec)) {
    if (!(lin->sigma >= 0.0)) throw std::invalid_argument("general_z: sigma < 0");
    for (std::size_t k = 1; k < z.size(); ++k) {
      z[k] = lin->alpha * grid.time(k) + lin->sigma * brownian[k];
    }
  } else if (const auto* gen = std::get_if<GeneralDrift>(&spec)) {
    if (!gen->b) throw std::invalid_argument("general_z: drift function is empty");
    if (!(gen->sigma >= 0.0)) throw std::invalid_argument("general_z: sigma < 0");
    const double dt = grid.dt();
    for (std::size_t k = 0; k + 1 < z.size(); ++k) {
      const double drift = gen->b(grid.time(k), z[k]);
      if (!std::isfinite(drift)) throw NumericalError("general_z: non-finite drift", k);
      z[k + 1] = z[k] + drift * dt + gen->sigma * (brownian[k + 1] - brownian[k]);
    }
  } else {
    throw std::invalid_argument("general_z: spec must be LinearDrift or GeneralDrift");
  }
  return SamplePath(grid, std::move(z), PathKind::kGeneralZ);
}

SamplePath polygonal_refine(const SamplePath& path, std::size_t factor) {
  if (factor < 2) throw std::invalid_argument("polygonal_refine: factor must be >= 2");
  const TimeGrid fine = path.grid().refined(factor);
  std::vector<double> v(fine.n_nodes());
  const auto f = static_cast<double>(factor);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double a = path[k];
    const double slope = path[k + 1] - a;
    v[k * factor] = a;
    for (std::size_t j = 1; j < factor; ++j) {
      v[k * factor + j] = a + (static_cast<double>(j) / f) * slope;
    }
  }
  v.back() = path.back();
  return SamplePath(fine, std::move(v), path.kind());
}

SamplePath subsample(const SamplePath& path, std::size_t factor) {
  if (factor < 1 || path.grid().n_steps() % factor != 0) {
    throw std::invalid_argument("subsample: factor must divide the step count");
  }
  const TimeGrid coarse(path.grid().t_end(), path.grid().n_steps() / factor);
  std::vector<double> v(coarse.n_nodes());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = path[k * factor];
  return SamplePath(coarse, std::move(v), path.kind());
}

double time_average(const SamplePath& path) { return time_average(path, 0); }

double time_average(const SamplePath& path, std::size_t first) {
  const TimeGrid& g = path.grid();
  if (first >= g.n_steps()) throw std::invalid_argument("time_average: empty window");
  double sum = 0.0;
  for (std::size_t k = first; k < g.n_steps(); ++k) sum += path[k] + path[k + 1];
  const double span = g.t_end() - g.time(first);
  return 0.5 * g.dt() * sum / span;
}

}  // namespace sisou
