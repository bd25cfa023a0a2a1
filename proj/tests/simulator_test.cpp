#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "koopman/simulator.hpp"
#include "test_models.hpp"

namespace koopman {
namespace {

using testing::linear;
using testing::ou;
using testing::vdp;

TEST(EmStep, Examples) {
  SdeSystem null_sys;
  null_sys.dimension = 2;
  null_sys.drift = {Polynomial(2), Polynomial(2)};
  null_sys.diffusion = {{Polynomial(2)}, {Polynomial(2)}};
  const double x[] = {0.3, -1.2};
  const double xi[] = {5.0};
  EXPECT_EQ(em_step(null_sys, x, 0.1, xi), std::vector<double>({0.3, -1.2}));

  const double one[] = {1.0};
  EXPECT_DOUBLE_EQ(em_step(linear(-1.0), one, 0.1, xi)[0], 0.9);

  const double z[] = {0.7};
  EXPECT_DOUBLE_EQ(em_step(ou(1.0, 0.5), one, 0.04, z)[0], 1.0 - 0.04 + 0.5 * 0.2 * 0.7);
}

TEST(EmStep, Errors) {
  const double one[] = {1.0};
  const double xi[] = {0.0};
  EXPECT_THROW(em_step(ou(), one, 0.0, xi), ParameterError);
  const double two[] = {1.0, 2.0};
  EXPECT_THROW(em_step(ou(), two, 0.1, xi), DimensionError);
  EXPECT_THROW(em_step(ou(), one, 0.1, two), DimensionError);
}

TEST(EmStep, DivergenceCarriesStepIndex) {
  SdeSystem s = linear(1.0);
  s.drift = {Polynomial::monomial({2})};
  const double big[] = {1e200};
  const double xi[] = {0.0};
  try {
    em_step(s, big, 0.1, xi);
    FAIL() << "expected a divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.step(), 1u);
  }

  SimulationConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 100.0;
  const double x0[] = {2.0};
  try {
    sample_path(s, x0, cfg);
    FAIL() << "expected a divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.step(), 1u);
    EXPECT_LT(e.step(), 1000u);
  }
}

TEST(NormalStream, MomentsOfStandardNormal) {
  NormalStream rng(17, 0);
  const int n = 400000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  EXPECT_NEAR(s4 / n, 3.0, 0.05);
}

TEST(NormalStream, StreamsAreReproducibleAndDistinct) {
  NormalStream a(5, 3), b(5, 3), c(5, 4), d(6, 3);
  double corr = 0.0;
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 10000; ++i) {
    const double x = a(), y = b(), z = c(), w = d();
    EXPECT_EQ(x, y);
    differs_c |= x != z;
    differs_d |= x != w;
    corr += x * z;
  }
  EXPECT_TRUE(differs_c);
  EXPECT_TRUE(differs_d);
  EXPECT_LT(std::abs(corr / 10000), 0.05);
}

TEST(SamplePath, DeterministicLinearMatchesEulerRecursion) {
  SimulationConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  const double x0[] = {2.0};
  const auto path = sample_path(linear(-0.7), x0, cfg, 3);
  ASSERT_EQ(path.size(), 101u);
  double x = 2.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    EXPECT_DOUBLE_EQ(path[k].x[0], x);
    EXPECT_NEAR(path[k].t, 0.01 * k, 1e-12);
    x = x + (-0.7 * x) * 0.01;
  }
}

TEST(SamplePath, SameSeedIsBitIdentical) {
  SimulationConfig cfg;
  cfg.seed = 99;
  cfg.t_end = 2.0;
  const double x0[] = {0.1, 0.2};
  const auto a = sample_path(vdp(), x0, cfg, 7);
  const auto b = sample_path(vdp(), x0, cfg, 7);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].x, b[k].x);
  const auto c = sample_path(vdp(), x0, cfg, 8);
  EXPECT_NE(a.back().x, c.back().x);
}

TEST(SamplePath, VanDerPolOscillates) {
  SimulationConfig cfg;
  cfg.seed = 1;
  cfg.t_end = 30.0;
  const double x0[] = {0.0, 0.0};
  const auto path = sample_path(vdp(), x0, cfg);
  int crossings = 0;
  double amplitude = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    if ((path[k - 1].x[0] < 0) != (path[k].x[0] < 0)) ++crossings;
    amplitude = std::max(amplitude, std::abs(path[k].x[0]));
  }
  // Limit-cycle period is about 6.7 and amplitude about 2.
  EXPECT_GE(crossings, 6);
  EXPECT_GT(amplitude, 1.5);
  EXPECT_LT(amplitude, 3.0);
}

TEST(SnapshotPairs, CountsAndContiguity) {
  SimulationConfig cfg;
  cfg.T = 0.1;
  cfg.t_end = 5.0;
  cfg.seed = 3;
  const std::vector<std::vector<double>> ten(10, {0.0, 0.0});
  const SnapshotSet s = snapshot_pairs(vdp(), ten, cfg);
  EXPECT_EQ(s.size(), 500u);
  for (Eigen::Index k = 0; k + 1 < 50; ++k) EXPECT_EQ(s.ys.col(k), s.xs.col(k + 1));
  EXPECT_EQ(s.xs.col(50), Eigen::Vector2d(0.0, 0.0));

  const std::vector<std::vector<double>> many(160, {0.0, 0.0});
  EXPECT_EQ(snapshot_pairs(vdp(), many, cfg).size(), 8000u);

  cfg.t_end = cfg.T;
  EXPECT_EQ(snapshot_pairs(vdp(), {{0.5, 0.5}}, cfg).size(), 1u);
}

TEST(SnapshotPairs, ThreadCountDoesNotChangeData) {
  SimulationConfig cfg;
  cfg.seed = 11;
  const std::vector<std::vector<double>> x0s(7, {0.2, -0.1});
  cfg.threads = 1;
  const SnapshotSet a = snapshot_pairs(vdp(), x0s, cfg, 100);
  cfg.threads = 3;
  const SnapshotSet b = snapshot_pairs(vdp(), x0s, cfg, 100);
  EXPECT_EQ(a.xs, b.xs);
  EXPECT_EQ(a.ys, b.ys);
}

TEST(SnapshotPairs, HorizonMustDivide) {
  SimulationConfig cfg;
  cfg.T = 0.3;
  cfg.t_end = 1.0;
  EXPECT_THROW(snapshot_pairs(vdp(), {{0.0, 0.0}}, cfg), ParameterError);
  cfg.T = 0.00015;
  EXPECT_THROW(snapshot_pairs(vdp(), {{0.0, 0.0}}, cfg), ParameterError);
}

TEST(MonteCarlo, DeterministicSystemHasZeroSpread) {
  SimulationConfig cfg;
  cfg.T = 0.1;
  cfg.dt = 0.01;
  cfg.n_samples = 10;
  cfg.n_repeats = 5;
  const double x0[] = {1.0};
  const auto est = mc_expectation(linear(-1.0), x0, {1}, cfg);
  EXPECT_EQ(est.std, 0.0);
  EXPECT_DOUBLE_EQ(est.mean, std::pow(0.99, 10));
}

TEST(MonteCarlo, OrnsteinUhlenbeckMoments) {
  SimulationConfig cfg;
  cfg.T = 0.1;
  cfg.dt = 1e-3;
  cfg.n_samples = 1000;
  cfg.n_repeats = 40;
  cfg.seed = 8;
  cfg.threads = 2;
  const double one[] = {1.0};
  const auto m1 = mc_expectation(ou(1.0, 0.5), one, {1}, cfg);
  EXPECT_LT(std::abs(m1.mean - std::exp(-0.1)), 3.0 * m1.std / std::sqrt(40.0) + 1e-4);

  const double zero[] = {0.0};
  const auto m2 = mc_expectation(ou(1.0, 0.5), zero, {2}, cfg);
  EXPECT_LT(std::abs(m2.mean - 0.125 * (1.0 - std::exp(-0.2))), 3.0 * m2.std / std::sqrt(40.0) + 1e-4);
}

TEST(MonteCarlo, MatchesEulerSecondMomentRecursion) {
  // For Euler-Maruyama on OU, E[x^2] obeys m <- (1 - g dt)^2 m + s^2 dt exactly.
  SimulationConfig cfg;
  cfg.T = 0.5;
  cfg.dt = 0.05;
  cfg.n_samples = 5000;
  cfg.n_repeats = 20;
  cfg.seed = 12;
  const double x0[] = {0.5};
  double m = 0.25;
  for (int k = 0; k < 10; ++k) m = (1 - 0.05) * (1 - 0.05) * m + 0.25 * 0.05;
  const auto est = mc_expectation(ou(1.0, 0.5), x0, {2}, cfg);
  EXPECT_LT(std::abs(est.mean - m), 3.0 * est.std / std::sqrt(20.0));
}

TEST(MonteCarlo, ReproducibleAcrossThreadCounts) {
  SimulationConfig cfg;
  cfg.T = 0.2;
  cfg.n_samples = 50;
  cfg.n_repeats = 6;
  cfg.seed = 4;
  const double x0[] = {0.0, 0.0};
  cfg.threads = 1;
  const auto a = mc_expectation(vdp(), x0, {2, 0}, cfg);
  cfg.threads = 4;
  const auto b = mc_expectation(vdp(), x0, {2, 0}, cfg);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std, b.std);
}

}  // namespace
}  // namespace koopman
