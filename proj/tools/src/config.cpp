#include "sisou/cli/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sisou/error.hpp"

namespace sisou::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(std::string(key), "expected a finite number, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key),
                      "expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(std::string(key), "expected true or false, got '" + std::string(v) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError(std::string(key), "expected a comma-separated list");
  return out;
}

std::string optional_key(std::string_view key, const std::optional<double>& v) {
  return v ? fmt::format("{} = {}\n", key, format_number(*v)) : std::string();
}

template <typename Fn>
auto rethrow_as_config(std::string_view field, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(field), e.what());
  }
}

}  // namespace

std::string_view to_string(NoiseKind k) noexcept {
  switch (k) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kOu: return "ou";
    case NoiseKind::kLinear: return "linear";
  }
  return "unknown";
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

void set_value(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  if (key == "n") c.n = parse_double(key, v);
  else if (key == "i0") c.i0 = parse_double(key, v);
  else if (key == "beta") c.beta = parse_double(key, v);
  else if (key == "gamma_mu") c.gamma_mu = parse_double(key, v);
  else if (key == "noise") {
    if (v == "none") c.noise = NoiseKind::kNone;
    else if (v == "ou") c.noise = NoiseKind::kOu;
    else if (v == "linear") c.noise = NoiseKind::kLinear;
    else throw ConfigError("noise", "expected none, ou or linear, got '" + std::string(v) + "'");
  } else if (key == "alpha") c.alpha = parse_double(key, v);
  else if (key == "sigma") c.sigma = parse_double(key, v);
  else if (key == "route") {
    const auto r = parse_route(v);
    if (!r) {
      throw ConfigError("route", "expected closed_form, ito_em, wong_zakai or gray, got '" +
                                     std::string(v) + "'");
    }
    c.route = *r;
  } else if (key == "t_end") c.t_end = parse_double(key, v);
  else if (key == "dt") c.dt = parse_double(key, v);
  else if (key == "seed") c.seed = parse_u64(key, v);
  else if (key == "stream") c.stream = parse_u64(key, v);
  else if (key == "paths") c.paths = parse_u64(key, v);
  else if (key == "seeds") c.seeds = parse_u64(key, v);
  else if (key == "dt_list") c.dt_list = parse_list(key, v);
  else if (key == "eps_extinct") c.eps_extinct = parse_double(key, v);
  else if (key == "window_fraction") c.window_fraction = parse_double(key, v);
  else if (key == "min_crossings") c.min_crossings = parse_u64(key, v);
  else if (key == "hysteresis") c.hysteresis = parse_double(key, v);
  else if (key == "margin") c.margin = parse_double(key, v);
  else if (key == "rk4_substeps") c.rk4_substeps = parse_u64(key, v);
  else if (key == "wz_refine") c.wz_refine = parse_u64(key, v);
  else if (key == "include_noise") c.include_noise = parse_bool(key, v);
  else throw ConfigError(std::string(key), "unknown key");
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    }
    set_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void resolve_defaults(RunConfig& c, std::string_view command) {
  if (!c.t_end) {
    if (command == "converge") c.t_end = 10.0;
    else c.t_end = c.beta * c.n - c.gamma_mu > 0.0 ? 400.0 : 200.0;
  }
  if (!c.paths) c.paths = command == "figures" ? 5 : 100;
  if (c.dt_list.empty()) {
    for (int e = 6; e <= 12; ++e) c.dt_list.push_back(std::ldexp(1.0, -e));
  }
}

std::string serialize(const RunConfig& c) {
  std::string out;
  auto num = [&](std::string_view key, double v) {
    out += fmt::format("{} = {}\n", key, format_number(v));
  };
  auto integer = [&](std::string_view key, std::uint64_t v) { out += fmt::format("{} = {}\n", key, v); };
  num("n", c.n);
  num("i0", c.i0);
  num("beta", c.beta);
  num("gamma_mu", c.gamma_mu);
  out += fmt::format("noise = {}\n", to_string(c.noise));
  num("alpha", c.alpha);
  num("sigma", c.sigma);
  out += fmt::format("route = {}\n", to_string(c.route));
  out += optional_key("t_end", c.t_end);
  num("dt", c.dt);
  integer("seed", c.seed);
  integer("stream", c.stream);
  if (c.paths) integer("paths", *c.paths);
  integer("seeds", c.seeds);
  if (!c.dt_list.empty()) {
    out += "dt_list = ";
    for (std::size_t j = 0; j < c.dt_list.size(); ++j) {
      out += (j ? "," : "") + format_number(c.dt_list[j]);
    }
    out += '\n';
  }
  out += optional_key("eps_extinct", c.eps_extinct);
  num("window_fraction", c.window_fraction);
  integer("min_crossings", c.min_crossings);
  num("hysteresis", c.hysteresis);
  out += optional_key("margin", c.margin);
  integer("rk4_substeps", c.rk4_substeps);
  integer("wz_refine", c.wz_refine);
  out += fmt::format("include_noise = {}\n", c.include_noise ? "true" : "false");
  return out;
}

ModelParams model_of(const RunConfig& c) {
  return rethrow_as_config("model", [&] { return ModelParams(c.n, c.i0, c.beta, c.gamma_mu); });
}

NoiseSpec noise_of(const RunConfig& c) {
  switch (c.noise) {
    case NoiseKind::kNone: return NoNoise{};
    case NoiseKind::kOu: return OuParams{c.alpha, c.sigma};
    case NoiseKind::kLinear: return LinearDrift{c.alpha, c.sigma};
  }
  return NoNoise{};
}

Scenario scenario_of(const RunConfig& c) {
  if (!c.t_end) throw ConfigError("t_end", "not set");
  const TimeGrid grid = rethrow_as_config("dt", [&] { return TimeGrid::with_step(*c.t_end, c.dt); });
  Scenario s{model_of(c), noise_of(c), c.route, grid};
  s.classifier.eps_extinct = c.eps_extinct;
  s.classifier.window_fraction = c.window_fraction;
  s.classifier.min_crossings = c.min_crossings;
  s.classifier.hysteresis = c.hysteresis;
  s.integrator.margin = c.margin;
  s.integrator.rk4_substeps = c.rk4_substeps;
  s.wz_refine = c.wz_refine;
  if (c.rk4_substeps < 1) throw ConfigError("rk4_substeps", "must be >= 1");
  rethrow_as_config("scenario", [&] { validate(s); });
  return s;
}

}  // namespace sisou::cli
