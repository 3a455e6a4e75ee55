#include "censbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "censbo/error.hpp"
#include "censbo/problems.hpp"
#include "oracles.hpp"

namespace censbo {
namespace {

TEST(ExpectedImprovement, AtTheIncumbentMean) {
  EXPECT_NEAR(expected_improvement(2.0, 1.0, 2.0), 0.3989423, 5e-8);
  EXPECT_NEAR(expected_improvement(2.0, 1.0, 2.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(expected_improvement(-7.0, 3.0, -7.0), 3.0 * 0.3989422804014327, 1e-12);
}

TEST(ExpectedImprovement, ZeroSigma) {
  EXPECT_EQ(expected_improvement(3.0, 0.0, 2.0), 0.0);
  EXPECT_EQ(expected_improvement(2.0, 0.0, 2.0), 0.0);
  EXPECT_EQ(expected_improvement(1.5, 0.0, 2.0), 0.5);
}

TEST(ExpectedImprovement, RejectsBadInput) {
  EXPECT_THROW(expected_improvement(0.0, -1.0, 0.0), DomainError);
  EXPECT_THROW(expected_improvement(std::nan(""), 1.0, 0.0), DomainError);
  EXPECT_THROW(expected_improvement(0.0, 1.0, std::numeric_limits<double>::infinity()),
               DomainError);
}

TEST(ExpectedImprovement, MatchesMonteCarlo) {
  const auto mc = oracle::monte_carlo_ei(0.0, 1.0, 1.0, 1'000'000, 42);
  EXPECT_NEAR(expected_improvement(0.0, 1.0, 1.0), mc.mean, 3.0 * mc.standard_error);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 10; ++i) {
    const double mu = u(rng);
    const double sigma = std::exp(u(rng) / 2.0);
    const double f_min = mu + sigma * u(rng);
    const auto est = oracle::monte_carlo_ei(mu, sigma, f_min, 400'000, 100 + i);
    EXPECT_NEAR(expected_improvement(mu, sigma, f_min), est.mean, 3.0 * est.standard_error + 1e-12);
  }
}

TEST(ExpectedImprovement, StableFarInTheTail) {
  double prev = expected_improvement(0.0, 1.0, 0.0);
  for (double gap = 1.0; gap <= 30.0; gap += 1.0) {
    const double ei = expected_improvement(gap, 1.0, 0.0);
    EXPECT_GE(ei, 0.0);
    EXPECT_LT(ei, prev);
    prev = ei;
  }
  // EI(f_min - gap) ~ phi(gap) / gap^2 for large gap
  const double gap = 30.0;
  const double asym = std::exp(-0.5 * gap * gap) * 0.3989422804014327 / (gap * gap);
  EXPECT_NEAR(expected_improvement(gap, 1.0, 0.0) / asym, 1.0, 0.01);
  for (double gap = 31.0; gap <= 60.0; gap += 1.0) EXPECT_GE(expected_improvement(gap, 1.0, 0.0), 0.0);
  // far below f_min, EI approaches f_min - mu
  EXPECT_NEAR(expected_improvement(-40.0, 1.0, 0.0), 40.0, 1e-12);
}

TEST(ExpectedImprovement, IncreasesWithSigmaAndImprovement) {
  for (double s = 0.1; s < 5.0; s += 0.1) {
    EXPECT_LT(expected_improvement(1.0, s, 0.0), expected_improvement(1.0, s + 0.1, 0.0));
    EXPECT_LT(expected_improvement(1.0, s, 0.0), expected_improvement(0.9, s, 0.0));
  }
}

Forest constant_forest(const ConfigurationSpace& space, double value) {
  ForestConfig cfg;
  cfg.num_trees = 3;
  return Forest(space, cfg,
                std::vector<RegressionTree>(3, RegressionTree::constant(value)));
}

TEST(MaximizeEi, FlatForestGivesZero) {
  const ConfigurationSpace space({Continuous{0.0, 1.0}, Categorical{3}});
  const auto forest = constant_forest(space, 5.0);
  AcquisitionConfig cfg;
  cfg.num_random_candidates = 200;
  cfg.seed = 1;
  const auto a = maximize_ei(forest, 2.0, space, cfg);
  const auto again = maximize_ei(forest, 2.0, space, cfg);
  cfg.seed = 2;
  const auto b = maximize_ei(forest, 2.0, space, cfg);
  EXPECT_EQ(a.ei, 0.0);
  EXPECT_NEAR(a.ei, b.ei, 1e-9);
  EXPECT_EQ(a.theta, again.theta);
  EXPECT_TRUE(space.contains(a.theta));
}

TEST(MaximizeEi, BeatsDenseGridOn1dForest) {
  const ConfigurationSpace space({Continuous{0.0, 1.0}});
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Configuration> x;
  std::vector<double> y;
  for (int i = 0; i < 12; ++i) {
    x.push_back({u(rng)});
    y.push_back(std::log10(synthetic_1d(x.back()[0])));
  }
  ForestConfig fcfg;
  fcfg.num_trees = 50;
  fcfg.seed = 5;
  const auto forest = fit_forest(space, x, y, fcfg);
  const double f_min = *std::min_element(y.begin(), y.end());
  AcquisitionConfig cfg;
  cfg.num_random_candidates = 500;
  const auto best = maximize_ei(forest, f_min, space, cfg);
  for (int k = 0; k < 10000; ++k) {
    const auto p = forest.predict({(k + 0.5) / 10000.0});
    EXPECT_GE(best.ei, expected_improvement(p.mu, p.sd(), f_min) - 1e-12);
  }
  const auto at = forest.predict(best.theta);
  EXPECT_EQ(best.ei, expected_improvement(at.mu, at.sd(), f_min));
}

TEST(MaximizeEi, LocalSearchImprovesOnRandomScanInMixedSpace) {
  const ConfigurationSpace space({Continuous{0.0, 1.0}, Continuous{0.0, 1.0}, Categorical{3}});
  Rng rng(4);
  std::vector<Configuration> x;
  std::vector<double> y;
  for (int i = 0; i < 60; ++i) {
    x.push_back(space.sample_uniform(rng));
    y.push_back((x.back()[0] - 0.2) * (x.back()[0] - 0.2) + x.back()[1] + x.back()[2]);
  }
  ForestConfig fcfg;
  fcfg.num_trees = 30;
  const auto forest = fit_forest(space, x, y, fcfg);
  const double f_min = *std::min_element(y.begin(), y.end());
  AcquisitionConfig scan_only;
  scan_only.num_random_candidates = 50;
  scan_only.num_local_starts = 0;
  AcquisitionConfig with_search = scan_only;
  with_search.num_local_starts = 5;
  const auto a = maximize_ei(forest, f_min, space, scan_only);
  const auto b = maximize_ei(forest, f_min, space, with_search);
  EXPECT_GE(b.ei, a.ei);
  EXPECT_TRUE(space.contains(b.theta));
}

TEST(AcquisitionConfig, Validation) {
  AcquisitionConfig cfg;
  cfg.num_random_candidates = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

}  // namespace
}  // namespace censbo
