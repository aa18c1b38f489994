#include <gtest/gtest.h>

#include <cmath>

#include <autoexplore/certificate.hpp>
#include <autoexplore/generators.hpp>

using namespace autoexplore;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Policy random_policy(int n_states, int n_actions, std::uint64_t seed) {
  CounterRng rng(seed, 11);
  MatrixXd probs(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      probs(s, a) = rng.exponential();
    }
    probs.row(s) /= probs.row(s).sum();
  }
  return Policy(probs);
}

GapEstimate gap_of(double value) {
  GapEstimate g;
  g.g_hat = VectorXd::Constant(2, value);
  g.max = value;
  return g;
}

}  // namespace

TEST(ExactGap, ZeroAtOptimum) {
  const auto mdp = gen_garnet(5, 3, 2, 4, 0.85);
  const auto star = solve_optimal(mdp);
  EXPECT_LT(exact_gap(mdp, star.policy).cwiseAbs().maxCoeff(), 1e-9);
  const auto single = gen_garnet(4, 1, 2, 4, 0.85);
  EXPECT_LT(exact_gap(single, Policy::uniform(4, 1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExactGap, Sandwich) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto mdp = gen_garnet(5, 3, 3, seed, 0.8);
    const auto pi = random_policy(5, 3, seed);
    const VectorXd g = exact_gap(mdp, pi);
    const VectorXd diff = exact_value(mdp, pi) - solve_optimal(mdp).value;
    for (int s = 0; s < 5; ++s) {
      EXPECT_LE(g(s), diff(s) + 1e-9);
      EXPECT_LE(diff(s), g.maxCoeff() / 0.2 + 1e-9);
    }
  }
}

TEST(ExactGap, EntropyRegularizedIsNonNegative) {
  const auto mdp = gen_garnet(4, 3, 2, 2, 0.7);
  const auto h = Regularizer::negative_entropy(0.2, 1.0);
  const VectorXd g = exact_gap(mdp, random_policy(4, 3, 1), h);
  EXPECT_GE(g.minCoeff(), -1e-12);
}

TEST(GapEstimate, InjectedExactQ) {
  const auto mdp = gen_garnet(4, 3, 3, 6, 0.75);
  const auto pi = random_policy(4, 3, 6);
  const auto est = gap_from_q_estimates({exact_q(mdp, pi)}, pi);
  EXPECT_LT((est.g_hat - exact_gap(mdp, pi)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GapEstimate, InvariantToStateConstant) {
  const auto mdp = gen_garnet(4, 3, 3, 7, 0.75);
  const auto pi = random_policy(4, 3, 7);
  const MatrixXd q = exact_q(mdp, pi);
  const VectorXd shift = VectorXd::LinSpaced(4, -3.0, 5.0);
  const MatrixXd shifted = q.colwise() + shift;
  const auto a = gap_from_q_estimates({q, 0.5 * q}, pi);
  const auto b = gap_from_q_estimates({shifted, 0.5 * q}, pi);
  EXPECT_LT((a.g_hat - b.g_hat).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GapEstimate, SingleActionIsZero) {
  const auto mdp = gen_garnet(4, 1, 4, 5, 0.7);
  SampleStream stream(mdp, 1);
  const auto est = estimate_gap(stream, Policy::uniform(4, 1), 0.1, 5, 0.1, 0.5);
  EXPECT_EQ(est.max, 0.0);
  EXPECT_EQ(est.samples, stream.samples());
  EXPECT_EQ(est.replicates, 5);
}

TEST(GapEstimate, PhaseTwoCostGrowsWithRarePairs) {
  const auto mdp = gen_garnet(4, 3, 3, 9, 0.7);
  MatrixXd one_rare(4, 3), two_rare(4, 3);
  one_rare.rowwise() = Eigen::RowVector3d(0.48, 0.48, 0.04);
  two_rare.rowwise() = Eigen::RowVector3d(0.92, 0.04, 0.04);
  SampleStream a(mdp, 3), b(mdp, 3);
  const auto ga = estimate_gap(a, Policy(one_rare), 0.05, 20, 0.1, 0.5);
  const auto gb = estimate_gap(b, Policy(two_rare), 0.05, 20, 0.1, 0.5);
  EXPECT_EQ(ga.rare_pairs, 4 * 20);
  EXPECT_EQ(gb.rare_pairs, 8 * 20);
  EXPECT_GT(gb.phase2_samples, ga.phase2_samples);
}

TEST(Certificate, ThresholdAndBoundary) {
  const double thr = certificate_threshold(0.1, 100, 8, 0.1);
  EXPECT_NEAR(thr, 0.4 * std::pow(std::log2(8.0 * 8 * 100 / 0.1), 2), 1e-12);
  EXPECT_TRUE(certificate_passes(gap_of(0.0), 0.1, 100, 8, 0.1));
  EXPECT_TRUE(certificate_passes(gap_of(thr), 0.1, 100, 8, 0.1));
  EXPECT_FALSE(certificate_passes(gap_of(std::nextafter(thr, 1e300)), 0.1, 100, 8, 0.1));
}

TEST(Certificate, MonotoneInEpsilon) {
  for (double g : {0.5, 5.0, 50.0, 500.0}) {
    for (double eps : {0.01, 0.1, 1.0}) {
      if (certificate_passes(gap_of(g), eps, 50, 6, 0.2)) {
        EXPECT_TRUE(certificate_passes(gap_of(g), 2 * eps, 50, 6, 0.2));
      }
    }
  }
}

TEST(Certificate, Replicates) {
  EXPECT_EQ(certificate_replicates(0.5, 0.5), 128);
  EXPECT_EQ(certificate_replicates(0.5, 0.5, 10.0), 13);
  EXPECT_EQ(certificate_replicates(0.5, 0.5, 1e9), 1);
}
