#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sisou/ensemble.hpp"

namespace sisou::cli {

enum class NoiseKind { kNone, kOu, kLinear };

std::string_view to_string(NoiseKind k) noexcept;

// Everything that determines the output of a command. Keys in the flat
// key=value format match the member names.
struct RunConfig {
  double n = 200.0;
  double i0 = 100.0;
  double beta = 0.06;
  double gamma_mu = 10.0;

  NoiseKind noise = NoiseKind::kOu;
  double alpha = 0.4;
  double sigma = 0.005;

  Route route = Route::kClosedForm;
  // Unset values get a per-command default in resolve_defaults().
  std::optional<double> t_end;
  double dt = 0.01;

  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::optional<std::size_t> paths;
  std::size_t seeds = 20;
  std::vector<double> dt_list;

  std::optional<double> eps_extinct;
  double window_fraction = 0.5;
  std::size_t min_crossings = 4;
  double hysteresis = 0.02;

  std::optional<double> margin;
  std::size_t rk4_substeps = 8;
  std::size_t wz_refine = 1;

  bool include_noise = true;
};

/// Assigns one key. Throws ConfigError naming the key on an unknown key or a
/// malformed value.
void set_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Applies `key=value` lines on top of `base`. Blank lines and lines starting
/// with '#' are ignored.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Fills unset fields for `command`: t_end is 10 for converge, otherwise 400
/// when nu > 0 and 200 when not; paths is 5 for figures and 100 otherwise;
/// dt_list defaults to 2^-6 ... 2^-12.
void resolve_defaults(RunConfig& cfg, std::string_view command);

/// Effective configuration, one key per line, numbers with 17 significant
/// digits. parse_config(serialize(c)) reproduces c.
std::string serialize(const RunConfig& cfg);

ModelParams model_of(const RunConfig& cfg);
NoiseSpec noise_of(const RunConfig& cfg);

/// Builds and validates the scenario; requires resolved defaults. Invalid
/// combinations raise ConfigError.
Scenario scenario_of(const RunConfig& cfg);

/// Decimal text with 17 significant digits.
std::string format_number(double v);

}  // namespace sisou::cli
