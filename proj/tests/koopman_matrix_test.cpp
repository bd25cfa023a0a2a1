#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "koopman/koopman_matrix.hpp"
#include "koopman/simulator.hpp"
#include "test_models.hpp"

namespace koopman {
namespace {

using testing::ou;
using testing::vdp;

ResolventParams params(double T) {
  ResolventParams p;
  p.T = T;
  return p;
}

TEST(Dictionary, Ordering) {
  const Dictionary d(2, 2);
  const std::vector<MultiIndex> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(d.entries(), expected);
  EXPECT_EQ(Dictionary(2, 6).size(), 28u);
  EXPECT_EQ(Dictionary(1, 0).entries(), std::vector<MultiIndex>{MultiIndex{0}});
  EXPECT_EQ(d.index_of({1, 1}), 4u);
  EXPECT_FALSE(d.index_of({3, 0}).has_value());
}

TEST(Dictionary, Evaluate) {
  const Dictionary d(2, 2);
  const double x[] = {2.0, -3.0};
  const Eigen::VectorXd psi = d.evaluate(x);
  const double expected[] = {1.0, 2.0, -3.0, 4.0, -6.0, 9.0};
  for (int i = 0; i < 6; ++i) EXPECT_EQ(psi(i), expected[i]);
  const double bad[] = {1.0};
  EXPECT_THROW(d.evaluate(bad), DimensionError);
}

TEST(KoopmanElement, OrnsteinUhlenbeckClosedForms) {
  const AdjointOperator op = build_adjoint(ou(1.0, 0.5));
  const ResolventParams p = params(0.1);
  EXPECT_NEAR(koopman_element(op, {1}, {1}, p), std::exp(-0.1), 1e-3);
  EXPECT_NEAR(koopman_element(op, {2}, {0}, p), 0.125 * (1.0 - std::exp(-0.2)), 1e-3);
  EXPECT_NEAR(koopman_element(op, {2}, {2}, p), std::exp(-0.2), 1e-3);
  const double zero = koopman_element(op, {1}, {2}, p);
  EXPECT_EQ(zero, 0.0);
  EXPECT_FALSE(std::signbit(zero));
}

TEST(KoopmanElement, VanDerPolSecondMoment) {
  const AdjointOperator op = build_adjoint(vdp());
  EXPECT_NEAR(koopman_element(op, {2, 0}, {0, 0}, params(1.0)), 0.30373, 0.005);
}

TEST(KoopmanMatrix, OrnsteinUhlenbeckIsLowerTriangular) {
  const AdjointOperator op = build_adjoint(ou(1.0, 0.5));
  const KoopmanMatrix km = koopman_matrix(op, Dictionary(1, 4), params(0.1));
  for (int r = 0; r < 5; ++r) {
    for (int c = r + 1; c < 5; ++c) EXPECT_EQ(km.entries(r, c), 0.0);
    EXPECT_NEAR(km.entries(r, r), std::exp(-0.1 * r), 1e-3);
  }
  // Odd and even states never mix.
  EXPECT_EQ(km.entries(3, 0), 0.0);
  EXPECT_EQ(km.entries(4, 1), 0.0);
}

TEST(KoopmanMatrix, VanishingHorizonIsIdentity) {
  const AdjointOperator op = build_adjoint(vdp());
  const KoopmanMatrix km = koopman_matrix(op, Dictionary(2, 3), params(1e-12), {}, 2);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(10, 10);
  EXPECT_LT((km.entries - id).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(KoopmanMatrix, ConstantRowIsIndicator) {
  const AdjointOperator op = build_adjoint(vdp());
  const KoopmanMatrix km = koopman_matrix(op, Dictionary(2, 2), params(0.5));
  EXPECT_EQ(km.entries(0, 0), 1.0);
  for (int c = 1; c < 6; ++c) EXPECT_EQ(km.entries(0, c), 0.0);
}

TEST(KoopmanMatrix, ThreadCountDoesNotChangeEntries) {
  const AdjointOperator op = build_adjoint(vdp());
  const Dictionary d(2, 2);
  const KoopmanMatrix a = koopman_matrix(op, d, params(1.0), {}, 1);
  const KoopmanMatrix b = koopman_matrix(op, d, params(1.0), {}, 3);
  EXPECT_EQ(a.entries, b.entries);
  EXPECT_EQ(a.entries(3, 0), koopman_element(op, {2, 0}, {0, 0}, params(1.0)));
}

TEST(PredictObservable, Examples) {
  const AdjointOperator op = build_adjoint(ou(1.0, 0.5));
  const KoopmanMatrix km = koopman_matrix(op, Dictionary(1, 3), params(0.1));
  const double origin[] = {0.0};
  const std::vector<double> second{0.0, 0.0, 1.0, 0.0};
  EXPECT_EQ(predict_observable(km, second, origin), km.entries(2, 0));
  const std::vector<double> first{0.0, 1.0, 0.0, 0.0};
  const double one[] = {1.0};
  EXPECT_NEAR(predict_observable(km, first, one), std::exp(-0.1), 1e-3);

  KoopmanMatrix id{Dictionary(2, 2), 0.0, Eigen::MatrixXd::Identity(6, 6)};
  const std::vector<double> a{1.0, -2.0, 0.5, 0.0, 3.0, -1.0};
  const double x[] = {0.7, -1.1};
  EXPECT_NEAR(predict_observable(id, a, x), 1.0 - 1.4 - 0.55 + 3.0 * 0.7 * -1.1 - 1.21, 1e-14);
  EXPECT_THROW(predict_observable(id, first, x), DimensionError);
}

TEST(KoopmanMatrix, RowSumMatchesMonteCarlo) {
  // sum_n P_alpha(n) x0^n = E[X(T)^alpha | X(0) = x0]
  const SdeSystem s = vdp();
  const AdjointOperator op = build_adjoint(s);
  const double x0[] = {0.3, -0.2};
  const KoopmanMatrix km = koopman_matrix(op, Dictionary(2, 8), params(0.2), {}, 2);
  SimulationConfig cfg;
  cfg.T = 0.2;
  cfg.dt = 1e-3;
  cfg.n_samples = 2000;
  cfg.n_repeats = 20;
  cfg.seed = 42;
  for (const MultiIndex alpha : {MultiIndex{2, 0}, MultiIndex{1, 1}, MultiIndex{0, 2}}) {
    std::vector<double> coeffs(km.dictionary.size(), 0.0);
    coeffs[*km.dictionary.index_of(alpha)] = 1.0;
    const double dual = predict_observable(km, coeffs, x0);
    const MonteCarloEstimate mc = mc_expectation(s, x0, alpha, cfg);
    const double se = mc.std / std::sqrt(static_cast<double>(cfg.n_repeats));
    EXPECT_LT(std::abs(dual - mc.mean), 3.0 * se + 2e-3) << to_string(alpha);
  }
}

}  // namespace
}  // namespace koopman
