#include "sisou/paths.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sisou/error.hpp"

namespace sisou {
namespace {

double sample_variance(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

// Standard error of the sample variance of n Gaussian draws with variance v.
double variance_se(double v, std::size_t n) { return v * std::sqrt(2.0 / static_cast<double>(n - 1)); }

double median_abs(std::vector<double> x) {
  for (double& v : x) v = std::abs(v);
  std::sort(x.begin(), x.end());
  return 0.5 * (x[x.size() / 2 - 1] + x[x.size() / 2]);
}

TEST(TimeGrid, NodesAreExactMultiples) {
  const TimeGrid g(3.0, 7);
  EXPECT_EQ(g.n_nodes(), 8u);
  EXPECT_EQ(g.time(0), 0.0);
  EXPECT_EQ(g.time(7), 3.0);
  for (std::size_t k = 0; k <= 7; ++k) EXPECT_EQ(g.time(k), static_cast<double>(k) * 3.0 / 7.0);
  EXPECT_GT(g.dt(), 0.0);
}

TEST(TimeGrid, WithStep) {
  const TimeGrid g = TimeGrid::with_step(200.0, 0.01);
  EXPECT_EQ(g.n_steps(), 20000u);
  EXPECT_EQ(g.time(g.n_steps()), 200.0);
  EXPECT_THROW(TimeGrid::with_step(1.0, 0.3), std::invalid_argument);
  EXPECT_THROW(TimeGrid::with_step(1.0, 0.0), std::invalid_argument);
}

TEST(TimeGrid, RejectsDegenerate) {
  EXPECT_THROW(TimeGrid(0.0, 10), std::invalid_argument);
  EXPECT_THROW(TimeGrid(-1.0, 10), std::invalid_argument);
  EXPECT_THROW(TimeGrid(1.0, 0), std::invalid_argument);
}

TEST(SamplePath, EnforcesLengthAndOrigin) {
  const TimeGrid g(1.0, 2);
  EXPECT_THROW(SamplePath(g, {0.0, 1.0}, PathKind::kInfected), std::invalid_argument);
  EXPECT_THROW(SamplePath(g, {0.5, 1.0, 2.0}, PathKind::kOu), std::invalid_argument);
  EXPECT_NO_THROW(SamplePath(g, {0.5, 1.0, 2.0}, PathKind::kInfected));
}

TEST(Brownian, StartsAtZeroAndIsDeterministic) {
  const TimeGrid g(5.0, 500);
  for (std::uint64_t seed : {0ull, 1ull, 123456789ull, ~0ull}) {
    const SamplePath a = brownian(g, {seed, 3});
    const SamplePath b = brownian(g, {seed, 3});
    EXPECT_EQ(a.front(), 0.0);
    EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    EXPECT_EQ(a.kind(), PathKind::kBrownian);
  }
}

TEST(Brownian, TerminalVarianceEqualsHorizon) {
  const TimeGrid g(1.0, 1000);
  std::vector<double> terminal;
  for (std::uint64_t s = 0; s < 10000; ++s) terminal.push_back(brownian(g, {77, s}).back());
  const double v = sample_variance(terminal);
  EXPECT_LT(std::abs(v - 1.0), 5.0 * variance_se(1.0, terminal.size())) << "variance " << v;
}

TEST(Brownian, LongRunSlopeVanishes) {
  const TimeGrid g(100.0, 100000);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    worst = std::max(worst, std::abs(brownian(g, {5, s}).back() / 100.0));
  }
  EXPECT_LT(worst, 0.5);
}

TEST(Brownian, IncrementsUncorrelatedAtLagOne) {
  const TimeGrid g(1.0, 1'000'000);
  const SamplePath b = brownian(g, {11, 0});
  std::vector<double> inc(g.n_steps());
  for (std::size_t k = 0; k < inc.size(); ++k) inc[k] = b[k + 1] - b[k];
  double mean = 0.0;
  for (double v : inc) mean += v;
  mean /= static_cast<double>(inc.size());
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < inc.size(); ++k) {
    den += (inc[k] - mean) * (inc[k] - mean);
    if (k + 1 < inc.size()) num += (inc[k] - mean) * (inc[k + 1] - mean);
  }
  EXPECT_LT(std::abs(num / den), 5.0 / std::sqrt(1e6));
}

TEST(OuOnIncrements, ZeroSigmaIsIdenticallyZero) {
  const TimeGrid g(10.0, 1000);
  const SamplePath y = ou_on_increments(g, {0.4, 0.0}, brownian(g, {1, 0}));
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(OuOnIncrements, ZeroAlphaIsScaledBrownian) {
  const TimeGrid g(10.0, 1000);
  const SamplePath b = brownian(g, {2, 0});
  const SamplePath y = ou_on_increments(g, {0.0, 0.3}, b);
  for (std::size_t k = 0; k < y.size(); ++k) EXPECT_NEAR(y[k], 0.3 * b[k], 1e-13);
}

TEST(OuOnIncrements, RejectsGridMismatch) {
  const TimeGrid g(10.0, 1000);
  const SamplePath b = brownian(TimeGrid(10.0, 500), {2, 0});
  EXPECT_THROW(ou_on_increments(g, {0.4, 0.05}, b), std::invalid_argument);
}

TEST(OuOnIncrements, TerminalVarianceMatchesOuFormula) {
  const double alpha = 0.4, sigma = 0.05, t = 50.0;
  const double expected = sigma * sigma * (1.0 - std::exp(-2.0 * alpha * t)) / (2.0 * alpha);
  ASSERT_NEAR(expected, 0.003125, 1e-15);
  const TimeGrid g(t, 5000);
  std::vector<double> terminal;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    terminal.push_back(ou_on_increments(g, {alpha, sigma}, brownian(g, {31, s})).back());
  }
  const double v = sample_variance(terminal);
  EXPECT_LT(std::abs(v - expected), 5.0 * variance_se(expected, terminal.size())) << v;
}

TEST(OuExact, RejectsNonPositiveAlpha) {
  const TimeGrid g(1.0, 10);
  EXPECT_THROW(ou_exact(g, {0.0, 0.1}, {1, 0}), std::invalid_argument);
  EXPECT_THROW(ou_exact(g, {-1.0, 0.1}, {1, 0}), std::invalid_argument);
}

TEST(OuExact, ZeroSigmaIsIdenticallyZero) {
  const TimeGrid g(10.0, 100);
  const SamplePath y = ou_exact(g, {0.4, 0.0}, {1, 0});
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(OuExact, LongSingleStepReachesStationaryVariance) {
  const double alpha = 0.4, sigma = 0.05;
  const TimeGrid g(1000.0, 1);
  const double stationary = sigma * sigma / (2.0 * alpha);
  std::vector<double> y1;
  for (std::uint64_t s = 0; s < 10000; ++s) y1.push_back(ou_exact(g, {alpha, sigma}, {8, s}).back());
  EXPECT_LT(std::abs(sample_variance(y1) - stationary), 5.0 * variance_se(stationary, y1.size()));
}

TEST(OuExact, TerminalVarianceAndAgreementWithEuler) {
  const double alpha = 0.4, sigma = 0.05, t = 50.0;
  const double expected = sigma * sigma * (1.0 - std::exp(-2.0 * alpha * t)) / (2.0 * alpha);
  const TimeGrid g(t, 5000);
  std::vector<double> exact, euler;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    exact.push_back(ou_exact(g, {alpha, sigma}, {101, s}).back());
    euler.push_back(ou_on_increments(g, {alpha, sigma}, brownian(g, {202, s})).back());
  }
  const double se = variance_se(expected, exact.size());
  EXPECT_LT(std::abs(sample_variance(exact) - expected), 5.0 * se);
  // Two independent estimators: difference has sd sqrt(2) se, plus O(alpha dt) bias of Euler.
  const double bias = expected * alpha * g.dt() / 2.0;
  EXPECT_LT(std::abs(sample_variance(exact) - sample_variance(euler)), 5.0 * std::sqrt(2.0) * se + bias);
  double m_exact = 0.0, m_euler = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    m_exact += exact[i];
    m_euler += euler[i];
  }
  const double n = static_cast<double>(exact.size());
  EXPECT_LT(std::abs(m_exact / n - m_euler / n), 5.0 * std::sqrt(2.0 * expected / n));
}

TEST(GeneralZ, LinearDriftWithoutRampIsScaledBrownian) {
  const TimeGrid g(10.0, 1000);
  const SamplePath b = brownian(g, {3, 0});
  const SamplePath z = general_z(g, LinearDrift{0.0, 0.25}, b);
  for (std::size_t k = 0; k < z.size(); ++k) EXPECT_EQ(z[k], 0.25 * b[k]);
  EXPECT_EQ(z.kind(), PathKind::kGeneralZ);
}

TEST(GeneralZ, DeterministicRamp) {
  const TimeGrid g(100.0, 10000);
  const SamplePath z = general_z(g, LinearDrift{0.011, 0.0}, brownian(g, {3, 0}));
  EXPECT_DOUBLE_EQ(z.back(), 1.1);
}

TEST(GeneralZ, MeanRevertingDriftMatchesOuBitExactly) {
  const TimeGrid g(20.0, 4000);
  const SamplePath b = brownian(g, {4, 2});
  const double alpha = 0.4;
  const SamplePath z = general_z(g, GeneralDrift{[alpha](double, double z) { return -alpha * z; }, 0.05}, b);
  const SamplePath y = ou_on_increments(g, {alpha, 0.05}, b);
  for (std::size_t k = 0; k < z.size(); ++k) ASSERT_EQ(z[k], y[k]) << "node " << k;
}

TEST(GeneralZ, NonFiniteDriftReportsNode) {
  const TimeGrid g(1.0, 10);
  const auto bad = GeneralDrift{[](double t, double) {
                                  return t > 0.45 ? std::numeric_limits<double>::infinity() : 0.0;
                                },
                                0.1};
  try {
    general_z(g, bad, brownian(g, {1, 0}));
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.index(), 5u);
  }
}

TEST(GeneralZ, RejectsWrongSpecAndGrid) {
  const TimeGrid g(1.0, 10);
  const SamplePath b = brownian(g, {1, 0});
  EXPECT_THROW(general_z(g, OuParams{0.4, 0.1}, b), std::invalid_argument);
  EXPECT_THROW(general_z(TimeGrid(1.0, 20), LinearDrift{0.0, 1.0}, b), std::invalid_argument);
}

TEST(PolygonalRefine, MidpointOfUnitSegment) {
  const SamplePath p(TimeGrid(1.0, 1), {0.0, 1.0}, PathKind::kBrownian);
  const SamplePath r = polygonal_refine(p, 2);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[1], 0.5);
  EXPECT_EQ(r.grid().n_steps(), 2u);
}

TEST(PolygonalRefine, PreservesNodesAndIsPiecewiseLinear) {
  const TimeGrid g(2.0, 50);
  const SamplePath b = brownian(g, {6, 0});
  const std::size_t f = 8;
  const SamplePath r = polygonal_refine(b, f);
  EXPECT_EQ(r.grid().n_steps(), 50u * f);
  const SamplePath back = subsample(r, f);
  for (std::size_t k = 0; k < b.size(); ++k) ASSERT_EQ(back[k], b[k]);
  const double h = r.grid().dt();
  for (std::size_t seg = 0; seg < g.n_steps(); ++seg) {
    const double slope = (b[seg + 1] - b[seg]) / g.dt();
    for (std::size_t j = 0; j < f; ++j) {
      const std::size_t k = seg * f + j;
      EXPECT_NEAR((r[k + 1] - r[k]) / h, slope, 1e-9 * (1.0 + std::abs(slope)));
    }
  }
}

TEST(PolygonalRefine, RejectsSmallFactor) {
  const SamplePath p(TimeGrid(1.0, 1), {0.0, 1.0}, PathKind::kBrownian);
  EXPECT_THROW(polygonal_refine(p, 1), std::invalid_argument);
  EXPECT_THROW(polygonal_refine(p, 0), std::invalid_argument);
}

TEST(Subsample, BrownianOnCoarseGrid) {
  const TimeGrid g(1.0, 12);
  const SamplePath b = brownian(g, {1, 0});
  const SamplePath c = subsample(b, 4);
  EXPECT_EQ(c.grid(), TimeGrid(1.0, 3));
  EXPECT_EQ(c[3], b[12]);
  EXPECT_THROW(subsample(b, 5), std::invalid_argument);
}

TEST(TimeAverage, ConstantAndRamp) {
  const TimeGrid g(4.0, 40);
  EXPECT_DOUBLE_EQ(time_average(SamplePath(g, std::vector<double>(41, 2.5), PathKind::kInfected)), 2.5);
  std::vector<double> ramp(41);
  for (std::size_t k = 0; k < ramp.size(); ++k) ramp[k] = g.time(k);
  EXPECT_NEAR(time_average(SamplePath(g, ramp, PathKind::kInfected)), 2.0, 1e-14);
}

TEST(TimeAverage, OuAverageIsSmallOverLongHorizon) {
  // sd of (1/T) int Y is about sigma / (alpha sqrt(T)) = 0.00395 at T = 1000.
  const TimeGrid g(1000.0, 100000);
  const SamplePath y = ou_on_increments(g, {0.4, 0.05}, brownian(g, {12, 0}));
  EXPECT_LT(std::abs(time_average(y)), 0.02);
}

TEST(TimeAverage, ErgodicAverageShrinksWithHorizon) {
  double previous = std::numeric_limits<double>::infinity();
  for (double t : {1e2, 1e3, 1e4}) {
    const TimeGrid g(t, static_cast<std::size_t>(t * 10));
    std::vector<double> avgs;
    for (std::uint64_t s = 0; s < 100; ++s) {
      avgs.push_back(time_average(ou_on_increments(g, {0.4, 0.05}, brownian(g, {13, s}))));
    }
    const double med = median_abs(avgs);
    EXPECT_LT(med, previous) << "T = " << t;
    previous = med;
  }
}

}  // namespace
}  // namespace sisou
