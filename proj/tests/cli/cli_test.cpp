#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "sisou/cli/commands.hpp"
#include "sisou/cli/config.hpp"
#include "sisou/error.hpp"

namespace sisou::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sisou_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    for (std::string cell; std::getline(cs, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string summary_value(const std::string& text, const std::string& key) {
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  }
  return "<missing " + key + ">";
}

TEST(Config, ParsesAndRejects) {
  const RunConfig c = parse_config("# comment\n n = 300 \nroute=ito_em\n\ndt_list = 0.5, 0.25\n");
  EXPECT_EQ(c.n, 300.0);
  EXPECT_EQ(c.route, Route::kItoEm);
  EXPECT_EQ(c.dt_list, (std::vector<double>{0.5, 0.25}));
  EXPECT_THROW(parse_config("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("n = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("n = inf\n"), ConfigError);
  EXPECT_THROW(parse_config("seed = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("just a line\n"), ConfigError);
  try {
    parse_config("sigma = x\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "sigma");
  }
}

TEST(Config, SerializeRoundTrips) {
  RunConfig c;
  c.beta = 0.1 / 3.0;
  c.sigma = 0.05;
  c.noise = NoiseKind::kLinear;
  c.route = Route::kWongZakai;
  c.eps_extinct = 0.125;
  c.margin = 1e-9;
  c.include_noise = false;
  resolve_defaults(c, "ensemble");
  const RunConfig back = parse_config(serialize(c));
  EXPECT_EQ(serialize(back), serialize(c));
  EXPECT_EQ(back.beta, c.beta);
  EXPECT_EQ(back.dt_list, c.dt_list);
}

TEST(Config, ResolveDefaults) {
  RunConfig c;
  resolve_defaults(c, "ensemble");
  EXPECT_EQ(*c.t_end, 400.0);
  EXPECT_EQ(*c.paths, 100u);
  RunConfig e;
  e.gamma_mu = 12.0;
  resolve_defaults(e, "simulate");
  EXPECT_EQ(*e.t_end, 200.0);
  RunConfig v;
  resolve_defaults(v, "converge");
  EXPECT_EQ(*v.t_end, 10.0);
  EXPECT_EQ(v.dt_list.size(), 7u);
}

TEST(ExitCodes, FromTheExecutable) {
  const std::string bin = SISOU_CLI_BINARY;
  const fs::path dir = scratch("exit");
  auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " >" + (dir / "o").string() + " 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status("deterministic --t-end 1"), 0);
  EXPECT_EQ(status("--help"), 0);
  EXPECT_EQ(status("nonsense"), 2);
  EXPECT_EQ(status("simulate --route euler"), 2);
  EXPECT_EQ(status("simulate --config " + (dir / "missing.cfg").string()), 2);
  EXPECT_EQ(status("simulate --dt -1"), 2);
  EXPECT_EQ(status("figures 7"), 2);
  EXPECT_EQ(status("converge"), 2);
  fs::create_directories(dir / "blocker");
  EXPECT_EQ(status("simulate --t-end 1 --out " + (dir / "blocker").string()), 1);
}

TEST(ExitCodes, InProcess) {
  EXPECT_EQ(run_cli({"ensemble", "--set", "paths=0"}).code, 2);
  EXPECT_EQ(run_cli({"simulate", "--set", "i0=500"}).code, 2);
  EXPECT_EQ(run_cli({"simulate", "--set", "noclue"}).code, 2);
  EXPECT_EQ(run_cli({"simulate", "--route", "gray", "--set", "noise=linear"}).code, 2);
  const Result r = run_cli({"simulate", "--paths", "x"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(Simulate, CsvShapeAndPrecision) {
  const Result r = run_cli({"simulate", "--t-end", "2", "--dt", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "infected", "noise"}));
  EXPECT_EQ(rows[1][1], "100");
  EXPECT_EQ(rows[5][0], "2");
  EXPECT_GE(rows[2][1].size(), 17u);
  const Result plain = run_cli({"simulate", "--t-end", "2", "--dt", "0.5", "--set", "include_noise=false"});
  EXPECT_EQ(csv_rows(plain.out)[0], (std::vector<std::string>{"t", "infected"}));
}

TEST(Simulate, ZeroRateScenarioEndsBelowThreshold) {
  const Result r = run_cli({"simulate", "--set", "gamma_mu=12", "--t-end", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  EXPECT_LT(std::stod(rows.back()[1]), 0.2);
}

TEST(Simulate, ClosedFormAndEulerAgreeOnFineGrid) {
  const std::vector<std::string> base{"simulate", "--t-end", "10", "--dt", "1e-4", "--seed", "4"};
  auto with_route = [&](const std::string& route) {
    auto a = base;
    a.insert(a.end(), {"--route", route});
    const Result r = run_cli(a);
    EXPECT_EQ(r.code, 0) << r.err;
    return std::stod(csv_rows(r.out).back()[1]);
  };
  EXPECT_NEAR(with_route("closed_form"), with_route("ito_em"), 1.0);
}

TEST(Deterministic, MatchesTheLimit) {
  const Result r = run_cli({"deterministic", "--t-end", "100", "--dt", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(csv_rows(r.out).back()[1]), 100.0 / 3.0, 1e-6);
}

TEST(Reproducibility, RerunsAndThreadCountsAreByteIdentical) {
  const fs::path dir = scratch("repro");
  std::vector<std::string> contents;
  for (const char* threads : {"1", "1", "4"}) {
    const fs::path out = dir / (std::string("e") + threads + std::to_string(contents.size()) + ".csv");
    const Result r = run_cli({"ensemble", "--paths", "25", "--t-end", "60", "--route", "ito_em", "--threads",
                              threads, "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    contents.push_back(slurp(out) + slurp(fs::path(out).replace_extension().string() + ".quantiles.csv") +
                       r.out);
  }
  EXPECT_EQ(contents[0], contents[1]);
  EXPECT_EQ(contents[0], contents[2]);
}

TEST(Reproducibility, WriteConfigReproducesTheRun) {
  const fs::path dir = scratch("config");
  const fs::path cfg = dir / "effective.cfg";
  const Result first = run_cli({"simulate", "--seed", "42", "--stream", "7", "--t-end", "30", "--route", "ito_em",
                                "--set", "sigma=0.05", "--write-config", cfg.string()});
  ASSERT_EQ(first.code, 0) << first.err;
  const Result again = run_cli({"simulate", "--config", cfg.string()});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(first.out, again.out);
  EXPECT_EQ(parse_config(slurp(cfg)).seed, 42u);
}

TEST(Reproducibility, FlagsOverrideTheConfigFile) {
  const fs::path dir = scratch("override");
  const fs::path cfg = dir / "a.cfg";
  std::ofstream(cfg) << "t_end = 1\ndt = 0.5\nseed = 3\n";
  const Result a = run_cli({"simulate", "--config", cfg.string(), "--dt", "0.25"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(csv_rows(a.out).size(), 6u);
}

TEST(Ensemble, SummaryAndFiles) {
  const fs::path dir = scratch("ensemble");
  const fs::path out = dir / "run.csv";
  const Result r = run_cli({"ensemble", "--set", "gamma_mu=14", "--t-end", "200", "--paths", "30", "--out",
                            out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(summary_value(r.out, "extinct_fraction"), "1");
  EXPECT_EQ(summary_value(r.out, "x_star"), "none");
  EXPECT_EQ(slurp(dir / "run.summary.txt"), r.out);
  EXPECT_EQ(csv_rows(slurp(out)).size(), 31u);
  const auto q = csv_rows(slurp(dir / "run.quantiles.csv"));
  EXPECT_EQ(q[0], (std::vector<std::string>{"t", "mean", "q05", "q50", "q95"}));
  EXPECT_EQ(q.size(), 20002u);
}

TEST(Ensemble, SinglePathFractionsAreZeroOrOne) {
  const Result r = run_cli({"ensemble", "--paths", "1", "--t-end", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* key : {"extinct_fraction", "persistent_fraction", "inconclusive_fraction"}) {
    const std::string v = summary_value(r.out, key);
    EXPECT_TRUE(v == "0" || v == "1") << key << " = " << v;
  }
}

TEST(Ensemble, PositiveDriftPersists) {
  const Result r = run_cli({"ensemble", "--set", "noise=linear", "--set", "alpha=0.011", "--set", "gamma_mu=10",
                            "--t-end", "400"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GE(std::stod(summary_value(r.out, "persistent_fraction")), 0.95);
}

TEST(Converge, WritesTableAndSlope) {
  const fs::path dir = scratch("converge");
  const Result r = run_cli({"converge", "--route", "ito_em", "--seeds", "4", "--out", (dir / "c.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(slurp(dir / "c.csv"));
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0].back(), "slope");
  EXPECT_EQ(summary_value(r.out, "slope"), rows[1].back());
}

TEST(Figures, FourHasTwoPanelsWithConstantReference) {
  const fs::path dir = scratch("fig4");
  const Result r = run_cli({"figures", "4", "--t-end", "20", "--paths", "3", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"fig4_sigma_0.005.csv", "fig4_sigma_0.050.csv"}) {
    const auto rows = csv_rows(slurp(dir / name));
    ASSERT_EQ(rows.size(), 2002u) << name;
    EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "x_star", "infected_0", "infected_1", "infected_2"}));
    for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_NEAR(std::stod(rows[k][1]), 33.333, 1e-3);
  }
  EXPECT_TRUE(fs::exists(dir / "fig4_params.txt"));
}

TEST(Figures, SixHasFourPanelsAndNoReferenceWhenNotEndemic) {
  const fs::path dir = scratch("fig6");
  const Result r = run_cli({"figures", "6", "--t-end", "10", "--paths", "2", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t panels = 0;
  for (const auto& e : fs::directory_iterator(dir)) panels += e.path().extension() == ".csv";
  EXPECT_EQ(panels, 4u);
  EXPECT_EQ(csv_rows(slurp(dir / "fig6_r0_0.800.csv"))[0].size(), 3u);
  EXPECT_EQ(csv_rows(slurp(dir / "fig6_r0_1.200.csv"))[0][1], "x_star");
  const std::string params = slurp(dir / "fig6_params.txt");
  EXPECT_NE(params.find("r0_0.800.alpha: 0.010999999999999999"), std::string::npos) << params;
}

TEST(Figures, PanelDefinitions) {
  const auto two = figure_panels(2, RunConfig{});
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].config.gamma_mu, 14.0);
  EXPECT_EQ(*two[0].config.t_end, 200.0);
  const auto five = figure_panels(5, RunConfig{});
  ASSERT_EQ(five.size(), 4u);
  EXPECT_EQ(five[3].name, "r0_1.333");
  EXPECT_EQ(five[3].config.alpha, -0.011);
  EXPECT_THROW(figure_panels(1, RunConfig{}), ConfigError);
}

}  // namespace
}  // namespace sisou::cli
