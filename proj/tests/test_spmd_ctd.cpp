#include <gtest/gtest.h>

#include <cmath>

#include <autoexplore/generators.hpp>
#include <autoexplore/spmd_ctd.hpp>

using namespace autoexplore;
using Eigen::MatrixXd;

namespace {

// Desk-sized run: fixed k, N, m and a step above the theoretical cap.
SpmdCtdConfig relaxed(double gamma, const FeatureMap& fmap, int n_actions, int n_states) {
  DeskScale desk;
  desk.k_div = 1e12;
  desk.t_div = 1e9;
  desk.n_div = 1e9;
  auto c = synth_params(gamma, fmap, n_actions, n_states, 0.5, 0.1, 0.5, desk);
  c.k = 10;
  c.N = 4000;
  c.m = 30;
  c.iota = 0.05;
  c.f = 0.5;
  c.eps_state = 0.2;
  c.replicates = 1;
  c.eta = c.alpha / std::sqrt(static_cast<double>(c.k));
  return c;
}

}  // namespace

TEST(SynthParams, FloorArithmetic) {
  const auto c = synth_params(0.75, FeatureMap::identity(8), 2, 4, 0.5, 0.1, 0.5);
  EXPECT_DOUBLE_EQ(c.w_floor, 7.8125e-3);
  EXPECT_DOUBLE_EQ(c.eps_action, 0.03125);
  EXPECT_DOUBLE_EQ(c.mu_floor, c.w_floor);
  EXPECT_DOUBLE_EQ(c.iota, 0.25 / 512.0);
  EXPECT_TRUE(c.desk.is_theoretical());
  EXPECT_GT(c.k_theory, 1e6);
}

TEST(SynthParams, HalvingKappa) {
  const auto fmap = FeatureMap::identity(8);
  const auto a = synth_params(0.75, fmap, 2, 4, 0.5, 0.1, 0.5);
  const auto b = synth_params(0.75, fmap, 2, 4, 0.5, 0.1, 0.25);
  EXPECT_DOUBLE_EQ(b.w_floor, a.w_floor / 4);
  EXPECT_NEAR(b.T_theory / a.T_theory, 4.0, 1e-9);
}

TEST(SynthParams, DeskDivisorsAndValidation) {
  const auto fmap = FeatureMap::identity(8);
  DeskScale desk;
  desk.k_div = 1e6;
  desk.t_div = 1e3;
  desk.n_div = 1e4;
  const auto c = synth_params(0.75, fmap, 2, 4, 0.5, 0.1, 0.5, desk);
  EXPECT_EQ(c.k, clamp_count(c.k_theory / 1e6));
  EXPECT_EQ(c.N % c.T, 0);
  EXPECT_GE(c.m, CtdConfig::mixing_floor(0.75, 1.0, 4, c.mu_floor));
  EXPECT_EQ(c.replicates, static_cast<int>(std::ceil(std::log2(4.0 * c.k / 0.1))));
  EXPECT_THROW(synth_params(0.75, fmap, 2, 4, 0.5, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(synth_params(0.75, fmap, 3, 4, 0.5, 0.1, 0.5), std::invalid_argument);
}

TEST(SynthParams, ClampCount) {
  EXPECT_EQ(clamp_count(0.2), 1);
  EXPECT_EQ(clamp_count(2.1), 3);
  EXPECT_EQ(clamp_count(1e300), std::numeric_limits<std::int64_t>::max());
}

TEST(WeightFloor, ValidKappaPropagates) {
  const double gamma = 0.8;
  const auto mdp = gen_garnet(4, 2, 3, 5, gamma);
  const auto fmap = FeatureMap::identity(8);
  CounterRng rng(3, 0);
  for (int trial = 0; trial < 50; ++trial) {
    MatrixXd probs(4, 2);
    for (int s = 0; s < 4; ++s) {
      probs(s, 0) = rng.uniform();
      probs(s, 1) = 1 - probs(s, 0);
    }
    const Policy pi(probs);
    const double kappa = mixed_visitation(mdp, pi, 1, 0.5).minCoeff();
    const auto c = synth_params(gamma, fmap, 2, 4, 0.5, 0.1, kappa);
    const auto wm = build_weights(mdp, pi, fmap, 1, 0.5, c.eps_action);
    EXPECT_GE(wm.min_weight(), c.w_floor * (1 - 1e-12));
  }
}

TEST(SpmdCtdRun, ZeroIterationsReturnsStart) {
  const auto mdp = gen_garnet(3, 2, 2, 1, 0.7);
  const auto fmap = FeatureMap::identity(6);
  auto c = relaxed(0.7, fmap, 2, 3);
  c.k = 0;
  SampleStream stream(mdp, 0);
  const auto r = spmd_ctd_run(stream, fmap, c, nullptr, &mdp);
  EXPECT_EQ(r.policy.probs(), Policy::uniform(3, 2).probs());
  EXPECT_EQ(r.total_samples, 0);
  EXPECT_TRUE(r.record.empty());
}

TEST(SpmdCtdRun, SingleState) {
  const MatrixXd cost = (MatrixXd(1, 2) << 0.2, 0.9).finished();
  const TabularMdp two(1, 2, MatrixXd::Ones(2, 1), cost, 0.5);
  const auto fmap2 = FeatureMap::identity(2);
  auto c = relaxed(0.5, fmap2, 2, 1);
  SampleStream stream(two, 4);
  const auto r = spmd_ctd_run(stream, fmap2, c, nullptr, &two);
  for (double e : r.record.column("q_est_error")) {
    EXPECT_LE(e, 0.1);
  }
  EXPECT_LT(r.record.last("gap_linf"), r.record.summary()["initial_gap_linf"].get<double>());
  EXPECT_EQ(r.total_samples, stream.samples());

  const TabularMdp one(1, 1, MatrixXd::Ones(1, 1), MatrixXd::Constant(1, 1, 0.4), 0.5);
  const auto fmap1 = FeatureMap::identity(1);
  SampleStream s1(one, 4);
  const auto r1 = spmd_ctd_run(s1, fmap1, relaxed(0.5, fmap1, 1, 1), nullptr, &one);
  for (double e : r1.record.column("q_est_error")) {
    EXPECT_LE(e, 0.1);
  }
  EXPECT_EQ(r1.record.last("gap_linf"), 0.0);
}

TEST(SpmdCtdRun, RelaxedGarnetRegression) {
  const double gamma = 0.8;
  const auto mdp = gen_garnet(4, 2, 3, 0, gamma);
  const auto fmap = FeatureMap::identity(8);
  const auto c = relaxed(gamma, fmap, 2, 4);
  SampleStream stream(mdp, 0);
  const auto r = spmd_ctd_run(stream, fmap, c, nullptr, &mdp);
  const double initial = r.record.summary()["initial_gap_linf"].get<double>();
  EXPECT_GT(initial, 0.0);
  EXPECT_LE(r.record.last("gap_linf"), 0.25 * initial);
  EXPECT_EQ(r.total_samples, stream.samples());
  EXPECT_EQ(r.record.last("samples_cum"), static_cast<double>(stream.samples()));
}

TEST(SpmdCtdRun, EstimatesBoundedWithIdentityFeatures) {
  const double gamma = 0.8;
  const auto mdp = gen_garnet(4, 2, 3, 2, gamma);
  const auto fmap = FeatureMap::identity(8);
  const auto c = relaxed(gamma, fmap, 2, 4);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    SampleStream stream(mdp, seed);
    const auto q = ctd_run(stream, Policy::uniform(4, 2), fmap, c.ctd(0)).q_hat;
    EXPECT_LE(q.cwiseAbs().maxCoeff(), 2 / (1 - gamma));
  }
}

TEST(SpmdCtdRun, OriginSelectorIsUsed) {
  const auto mdp = gen_garnet(3, 2, 2, 3, 0.6);
  const auto fmap = FeatureMap::identity(6);
  auto c = relaxed(0.6, fmap, 2, 3);
  c.k = 3;
  c.N = 50;
  std::vector<std::int64_t> calls;
  SampleStream stream(mdp, 1);
  spmd_ctd_run(stream, fmap, c, [&](std::int64_t t, int) {
    calls.push_back(t);
    return 2;
  });
  EXPECT_EQ(calls, (std::vector<std::int64_t>{0, 1, 2}));
}
