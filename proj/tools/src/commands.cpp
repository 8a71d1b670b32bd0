#include "sisou/cli/commands.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "sisou/error.hpp"
#include "sisou/parallel.hpp"

namespace sisou::cli {
namespace {

using Buffer = fmt::memory_buffer;

void append_number(Buffer& buf, double v) { fmt::format_to(std::back_inserter(buf), "{:.17g}", v); }

void flush(const Buffer& buf, std::ostream& out) { out.write(buf.data(), static_cast<std::streamsize>(buf.size())); }

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("none");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string());
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  f.close();
  if (!f) throw std::runtime_error("error while writing " + path.string());
}

std::filesystem::path sibling(const std::filesystem::path& p, std::string_view suffix) {
  std::filesystem::path out = p;
  out.replace_extension();
  out += suffix;
  return out;
}

struct Figure {
  double t_end;
  std::vector<FigurePanel> panels;
  std::vector<std::string> notes;
};

std::string panel_label(double v, int decimals) { return fmt::format("{:.{}f}", v, decimals); }

Figure build_figure(int id, const RunConfig& base) {
  Figure fig;
  auto panel = [&](std::string name, double gamma_mu, NoiseKind noise, double alpha, double sigma) {
    RunConfig c = base;
    c.n = 200.0;
    c.i0 = 100.0;
    c.beta = 0.06;
    c.gamma_mu = gamma_mu;
    c.noise = noise;
    c.alpha = alpha;
    c.sigma = sigma;
    fig.panels.push_back({std::move(name), std::move(c)});
  };
  switch (id) {
    case 2:
    case 3:
    case 4: {
      const double gm = id == 2 ? 14.0 : id == 3 ? 12.0 : 10.0;
      fig.t_end = id == 4 ? 400.0 : 200.0;
      for (double sigma : {0.005, 0.05}) {
        panel("sigma_" + panel_label(sigma, 3), gm, NoiseKind::kOu, 0.4, sigma);
      }
      if (id == 2) {
        fig.notes.push_back("r0d_note: N = 200, beta = 0.06, gamma_mu = 14 give R0 = 12/14 = 0.857; "
                            "this value is used (0.8 is also quoted for this scenario)");
      }
      break;
    }
    case 5:
    case 6: {
      fig.t_end = 400.0;
      const double alpha = id == 5 ? -0.011 : 0.011;
      const std::vector<double> gms =
          id == 5 ? std::vector<double>{14.0, 12.0, 10.0, 9.0} : std::vector<double>{15.0, 14.0, 12.0, 10.0};
      for (double gm : gms) panel("r0_" + panel_label(12.0 / gm, 3), gm, NoiseKind::kLinear, alpha, 0.005);
      if (id == 6) {
        fig.notes.push_back("alpha_note: positive drift alpha = +0.011 is used for every panel, as described "
                            "for the positive-drift case; the value -0.011 quoted alongside it is not used");
      }
      break;
    }
    default:
      throw ConfigError("figure", "unknown figure id " + std::to_string(id) + " (expected 2..6)");
  }
  for (FigurePanel& p : fig.panels) {
    if (!p.config.t_end) p.config.t_end = fig.t_end;
    resolve_defaults(p.config, "figures");
  }
  return fig;
}

int parse_figure_id(const std::string& s) {
  if (s.size() == 1 && s[0] >= '2' && s[0] <= '6') return s[0] - '0';
  throw ConfigError("figure", "unknown figure id '" + s + "' (expected 2..6)");
}

}  // namespace

void write_simulation(const RunConfig& cfg, std::ostream& out) {
  const Scenario s = scenario_of(cfg);
  const SdeRun run = simulate_path(s, {cfg.seed, cfg.stream});
  Buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}", cfg.include_noise ? "t,infected,noise\n" : "t,infected\n");
  const TimeGrid& g = run.infected.grid();
  for (std::size_t k = 0; k < g.n_nodes(); ++k) {
    append_number(buf, g.time(k));
    buf.push_back(',');
    append_number(buf, run.infected[k]);
    if (cfg.include_noise) {
      buf.push_back(',');
      append_number(buf, run.noise[k]);
    }
    buf.push_back('\n');
  }
  flush(buf, out);
}

void write_deterministic(const RunConfig& cfg, std::ostream& out) {
  const ModelParams p = model_of(cfg);
  if (!cfg.t_end) throw ConfigError("t_end", "not set");
  const TimeGrid g = [&] {
    try {
      return TimeGrid::with_step(*cfg.t_end, cfg.dt);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("dt", e.what());
    }
  }();
  Buffer buf;
  fmt::format_to(std::back_inserter(buf), "t,infected\n");
  for (std::size_t k = 0; k < g.n_nodes(); ++k) {
    append_number(buf, g.time(k));
    buf.push_back(',');
    append_number(buf, deterministic_infected(p, g.time(k)));
    buf.push_back('\n');
  }
  flush(buf, out);
}

void write_ensemble_paths(const EnsembleSummary& e, std::ostream& out) {
  Buffer buf;
  fmt::format_to(std::back_inserter(buf),
                 "seed,stream,label,terminal,crossings,up_crossings,down_crossings,slope,"
                 "window_average,noise_average,violations\n");
  for (const PathRecord& r : e.paths) {
    const TrajectoryVerdict& v = r.verdict;
    fmt::format_to(std::back_inserter(buf), "{},{},{},", e.seed, r.stream, to_string(v.label));
    append_number(buf, v.terminal_value);
    fmt::format_to(std::back_inserter(buf), ",{},{},{},", v.crossings, v.up_crossings, v.down_crossings);
    append_number(buf, v.slope_estimate);
    buf.push_back(',');
    append_number(buf, v.window_average);
    buf.push_back(',');
    append_number(buf, r.noise_average);
    fmt::format_to(std::back_inserter(buf), ",{}\n", r.violations);
  }
  flush(buf, out);
}

void write_ensemble_quantiles(const EnsembleSummary& e, std::ostream& out) {
  if (!e.mean_path) throw std::logic_error("ensemble was run without path statistics");
  Buffer buf;
  fmt::format_to(std::back_inserter(buf), "t,mean,q05,q50,q95\n");
  const TimeGrid& g = e.mean_path->grid();
  for (std::size_t k = 0; k < g.n_nodes(); ++k) {
    append_number(buf, g.time(k));
    for (const auto* p : {&*e.mean_path, &*e.q05_path, &*e.q50_path, &*e.q95_path}) {
      buf.push_back(',');
      append_number(buf, (*p)[k]);
    }
    buf.push_back('\n');
  }
  flush(buf, out);
}

std::string ensemble_summary_text(const RunConfig& cfg, const EnsembleSummary& e) {
  double min_slope = 0.0, max_slope = 0.0;
  std::size_t both = 0;
  for (std::size_t i = 0; i < e.paths.size(); ++i) {
    const TrajectoryVerdict& v = e.paths[i].verdict;
    min_slope = i == 0 ? v.slope_estimate : std::min(min_slope, v.slope_estimate);
    max_slope = i == 0 ? v.slope_estimate : std::max(max_slope, v.slope_estimate);
    if (v.label == Verdict::kPersistent && v.up_crossings > 0 && v.down_crossings > 0) ++both;
  }
  const ModelParams p = model_of(cfg);
  std::string s;
  auto line = [&](std::string_view key, const std::string& value) { s += fmt::format("{}: {}\n", key, value); };
  line("command", "ensemble");
  line("route", std::string(to_string(cfg.route)));
  line("noise", std::string(to_string(cfg.noise)));
  line("n_paths", std::to_string(e.n_paths));
  line("seed", std::to_string(e.seed));
  line("t_end", format_number(*cfg.t_end));
  line("dt", format_number(cfg.dt));
  line("r0d", format_number(p.r0d()));
  line("nu", format_number(p.nu()));
  line("x_star", optional_number(equilibrium(p).x_star));
  line("reference_level", optional_number(e.reference));
  line("extinct_fraction", format_number(e.extinct_fraction));
  line("persistent_fraction", format_number(e.persistent_fraction));
  line("inconclusive_fraction", format_number(e.inconclusive_fraction));
  line("persistent_both_directions", std::to_string(both));
  line("mean_time_average_over_window", format_number(e.mean_time_average_over_window));
  line("mean_noise_average", format_number(e.mean_noise_average));
  line("min_slope", format_number(min_slope));
  line("max_slope", format_number(max_slope));
  line("total_violations", std::to_string(e.total_violations));
  return s;
}

void write_convergence(const ConvergenceTable& t, std::ostream& out) {
  Buffer buf;
  fmt::format_to(std::back_inserter(buf), "dt,median_error,median_violation_rate,slope\n");
  for (const ConvergenceRow& r : t.rows) {
    append_number(buf, r.dt);
    buf.push_back(',');
    append_number(buf, r.median_error);
    buf.push_back(',');
    append_number(buf, r.median_violation_rate);
    buf.push_back(',');
    append_number(buf, t.slope);
    buf.push_back('\n');
  }
  flush(buf, out);
}

std::string convergence_summary_text(const RunConfig& cfg, const ConvergenceTable& t) {
  bool decreasing = true;
  for (std::size_t j = 1; j < t.rows.size(); ++j) {
    decreasing = decreasing && t.rows[j].median_error < t.rows[j - 1].median_error;
  }
  std::string s;
  s += "command: converge\n";
  s += fmt::format("route: {}\n", to_string(cfg.route));
  s += fmt::format("seeds: {}\n", cfg.seeds);
  s += fmt::format("seed: {}\n", cfg.seed);
  s += fmt::format("t_end: {}\n", format_number(*cfg.t_end));
  s += fmt::format("reference_dt: {}\n", format_number(t.reference_dt));
  s += fmt::format("slope: {}\n", format_number(t.slope));
  s += fmt::format("strictly_decreasing: {}\n", decreasing ? "true" : "false");
  return s;
}

std::vector<FigurePanel> figure_panels(int id, const RunConfig& base) {
  return build_figure(id, base).panels;
}

std::vector<std::filesystem::path> write_figure(int id, const RunConfig& base,
                                                const std::filesystem::path& dir,
                                                std::size_t threads) {
  const Figure fig = build_figure(id, base);
  std::vector<std::filesystem::path> written;
  std::string params;
  auto line = [&](std::string_view key, const std::string& value) {
    params += fmt::format("{}: {}\n", key, value);
  };
  const RunConfig& first = fig.panels.front().config;
  line("figure", std::to_string(id));
  line("route", std::string(to_string(first.route)));
  line("seed", std::to_string(first.seed));
  line("streams", fmt::format("0..{}", *first.paths - 1));
  line("t_end", format_number(*first.t_end));
  line("dt", format_number(first.dt));
  line("trajectories_per_panel", std::to_string(*first.paths));

  for (const FigurePanel& panel : fig.panels) {
    const RunConfig& c = panel.config;
    const Scenario s = scenario_of(c);
    const std::size_t n_paths = *c.paths;
    std::vector<std::optional<SdeRun>> slots(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t j) {
      try {
        slots[j] = simulate_path(s, {c.seed, j});
      } catch (const std::exception& e) {
        throw PathError(j, e.what());
      }
    });
    const std::optional<double> x_star = equilibrium(s.model).x_star;
    Buffer buf;
    fmt::format_to(std::back_inserter(buf), "t");
    if (x_star) fmt::format_to(std::back_inserter(buf), ",x_star");
    for (std::size_t j = 0; j < n_paths; ++j) fmt::format_to(std::back_inserter(buf), ",infected_{}", j);
    buf.push_back('\n');
    const TimeGrid& g = slots.front()->infected.grid();
    for (std::size_t k = 0; k < g.n_nodes(); ++k) {
      append_number(buf, g.time(k));
      if (x_star) {
        buf.push_back(',');
        append_number(buf, *x_star);
      }
      for (std::size_t j = 0; j < n_paths; ++j) {
        buf.push_back(',');
        append_number(buf, slots[j]->infected[k]);
      }
      buf.push_back('\n');
    }
    const std::filesystem::path path = dir / fmt::format("fig{}_{}.csv", id, panel.name);
    write_file(path, std::string(buf.data(), buf.size()));
    written.push_back(path);

    const std::string prefix = panel.name + ".";
    line(prefix + "file", path.filename().string());
    line(prefix + "n", format_number(c.n));
    line(prefix + "i0", format_number(c.i0));
    line(prefix + "beta", format_number(c.beta));
    line(prefix + "gamma_mu", format_number(c.gamma_mu));
    line(prefix + "r0d", format_number(s.model.r0d()));
    line(prefix + "nu", format_number(s.model.nu()));
    line(prefix + "noise", std::string(to_string(c.noise)));
    line(prefix + "alpha", format_number(c.alpha));
    line(prefix + "sigma", format_number(c.sigma));
    line(prefix + "x_star", optional_number(x_star));
    std::size_t below = 0;
    for (const auto& r : slots) below += r->infected.back() < s.classifier.eps_for(s.model.n());
    line(prefix + "terminal_below_eps", fmt::format("{}/{}", below, n_paths));
  }
  for (const std::string& note : fig.notes) params += note + "\n";
  const std::filesystem::path params_path = dir / fmt::format("fig{}_params.txt", id);
  write_file(params_path, params);
  written.push_back(params_path);
  return written;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulations of the SIS epidemic model with an Ornstein-Uhlenbeck perturbed transmission rate"};
  app.name("sisou");
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path, out_path, route, write_config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed, stream;
  std::optional<std::size_t> paths, seeds;
  std::optional<double> t_end, dt;
  std::size_t threads = 0;

  app.add_option("--config", config_path, "Flat key=value configuration file");
  app.add_option("--set", sets, "Override one configuration key (KEY=VALUE); repeatable");
  app.add_option("--seed", seed, "Base seed (U64)");
  app.add_option("--stream", stream, "Stream index of the simulated path");
  app.add_option("--out", out_path, "Output file (directory for figures)");
  app.add_option("--route", route, "closed_form, ito_em, wong_zakai or gray");
  app.add_option("--paths", paths, "Number of paths");
  app.add_option("--seeds", seeds, "Number of seeds in a convergence study");
  app.add_option("--t-end", t_end, "Horizon T");
  app.add_option("--dt", dt, "Step size");
  app.add_option("--threads", threads, "Worker threads (0 = all cores); never changes output");
  app.add_option("--write-config", write_config, "Write the effective configuration to this path");

  auto* simulate = app.add_subcommand("simulate", "One trajectory as CSV");
  auto* ensemble = app.add_subcommand("ensemble", "Monte Carlo ensemble with per-path verdicts");
  auto* converge = app.add_subcommand("converge", "Strong-error study against the closed form");
  auto* figures = app.add_subcommand("figures", "Plot-ready CSVs for figures 2-6");
  auto* deterministic = app.add_subcommand("deterministic", "Deterministic solution as CSV");
  std::string figure_id;
  figures->add_option("id", figure_id, "Figure id (2..6)")->required();
  for (auto* sub : {simulate, ensemble, converge, figures, deterministic}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "sisou: " << e.what() << "\n";
    return 2;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set", "expected KEY=VALUE, got '" + kv + "'");
      set_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    if (stream) cfg.stream = *stream;
    if (!route.empty()) set_value(cfg, "route", route);
    if (paths) cfg.paths = *paths;
    if (seeds) cfg.seeds = *seeds;
    if (t_end) cfg.t_end = *t_end;
    if (dt) cfg.dt = *dt;

    if (command == "figures") {
      const int id = parse_figure_id(figure_id);
      if (!write_config.empty()) {
        RunConfig resolved = cfg;
        resolve_defaults(resolved, command);
        if (!cfg.t_end) resolved.t_end.reset();
        write_file(write_config, serialize(resolved));
      }
      const auto written = write_figure(id, cfg, out_path.empty() ? "." : out_path, threads);
      for (const auto& p : written) out << "wrote: " << p.string() << "\n";
      return 0;
    }

    resolve_defaults(cfg, command);
    if (!write_config.empty()) write_file(write_config, serialize(cfg));

    auto emit = [&](auto&& writer) {
      if (out_path.empty()) {
        writer(out);
      } else {
        std::ostringstream ss;
        writer(ss);
        write_file(out_path, ss.str());
      }
    };

    if (command == "simulate") {
      emit([&](std::ostream& os) { write_simulation(cfg, os); });
      if (!out_path.empty()) out << "wrote: " << out_path << "\n";
    } else if (command == "deterministic") {
      emit([&](std::ostream& os) { write_deterministic(cfg, os); });
      if (!out_path.empty()) out << "wrote: " << out_path << "\n";
    } else if (command == "ensemble") {
      const Scenario s = scenario_of(cfg);
      EnsembleOptions opt;
      opt.threads = threads;
      opt.path_statistics = !out_path.empty();
      const EnsembleSummary e = run_ensemble(s, *cfg.paths, cfg.seed, opt);
      const std::string summary = ensemble_summary_text(cfg, e);
      if (!out_path.empty()) {
        std::ostringstream per_path, quantiles;
        write_ensemble_paths(e, per_path);
        write_ensemble_quantiles(e, quantiles);
        write_file(out_path, per_path.str());
        write_file(sibling(out_path, ".summary.txt"), summary);
        write_file(sibling(out_path, ".quantiles.csv"), quantiles.str());
      }
      out << summary;
    } else if (command == "converge") {
      const Scenario s = scenario_of(cfg);
      const ConvergenceTable t = convergence_study(s, cfg.dt_list, cfg.seeds, cfg.seed, threads);
      emit([&](std::ostream& os) { write_convergence(t, os); });
      if (!out_path.empty()) out << convergence_summary_text(cfg, t);
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "sisou: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "sisou: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "sisou: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sisou::cli
