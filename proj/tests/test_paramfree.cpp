#include <gtest/gtest.h>

#include <cmath>

#include <autoexplore/generators.hpp>
#include <autoexplore/paramfree.hpp>

using namespace autoexplore;
using Eigen::MatrixXd;

namespace {

DeskScale desk() {
  DeskScale d;
  d.k_div = 1e7;
  d.t_div = 1e3;
  d.n_div = 1e6;
  d.cert_div = 10.0;
  return d;
}

ParamfreeConfig base_config(double gamma, int n_states) {
  ParamfreeConfig pc;
  pc.epsilon = 0.5;
  pc.delta = 0.2;
  pc.f = 0.5;
  pc.underline_kappa = kappa_preset_with_frequency(gamma, pc.f, n_states);
  pc.desk = desk();
  return pc;
}

}  // namespace

TEST(Presets, KappaWithFrequency) {
  EXPECT_DOUBLE_EQ(kappa_preset_with_frequency(0.75, 0.5, 4), 0.03125);
  EXPECT_THROW(kappa_preset_with_frequency(0.75, 0.0, 4), std::invalid_argument);
}

TEST(Presets, DoublingEpochs) {
  EXPECT_EQ(doubling_epochs(1.0), 0);
  EXPECT_EQ(doubling_epochs(0.03125), 5);
  EXPECT_EQ(doubling_epochs(0.3), 2);
  EXPECT_THROW(doubling_epochs(0.0), std::invalid_argument);
}

TEST(Presets, GapBound) {
  EXPECT_NEAR(certified_gap_bound(0.5, 0.5, 4, 2, 0.25), 6.0 * std::pow(std::log2(256.0), 2), 1e-12);
}

TEST(Paramfree, KappaOneRunsOneEpoch) {
  const auto mdp = gen_garnet(3, 2, 3, 1, 0.6);
  auto pc = base_config(0.6, 3);
  pc.underline_kappa = 1.0;
  SampleStream stream(mdp, 2);
  const auto r = paramfree_run(stream, FeatureMap::identity(6), pc, &mdp);
  EXPECT_EQ(r.epochs.size(), 1u);
  EXPECT_EQ(r.epoch, 0);
  EXPECT_EQ(r.total_samples, stream.samples());
}

TEST(Paramfree, ConstantCostCertifiesImmediately) {
  const auto g = gen_garnet(4, 2, 3, 3, 0.6);
  const TabularMdp mdp(4, 2, g.transition(), MatrixXd::Constant(4, 2, 0.3), 0.6);
  SampleStream stream(mdp, 0);
  const auto r = paramfree_run(stream, FeatureMap::identity(8), base_config(0.6, 4), &mdp);
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(r.epochs.size(), 1u);
  EXPECT_NEAR(r.final_gap_oracle, 0.0, 1e-10);
}

TEST(Paramfree, CertifiedWithinGapBound) {
  const double gamma = 0.6;
  const auto mdp = gen_garnet(4, 2, 4, 0, gamma);
  const auto pc = base_config(gamma, 4);
  SampleStream stream(mdp, 0);
  const auto r = paramfree_run(stream, FeatureMap::identity(8), pc, &mdp);
  ASSERT_TRUE(r.certified);
  EXPECT_LE(r.final_gap_oracle,
            certified_gap_bound(pc.epsilon, gamma, static_cast<double>(r.k), 4, pc.delta));
  // Early exit: the certified epoch is the last one run.
  EXPECT_EQ(static_cast<int>(r.epochs.size()), r.epoch + 1);
  for (std::size_t i = 0; i + 1 < r.epochs.size(); ++i) {
    EXPECT_FALSE(r.epochs[i].certified);
  }
  EXPECT_EQ(r.record.size(), r.epochs.size());
  const auto summary = r.summary();
  EXPECT_TRUE(summary.at("certified").get<bool>());
  EXPECT_TRUE(summary.contains("final_gap_oracle"));
}

TEST(Paramfree, WithoutStateExplorationCertifies) {
  const double gamma = 0.6;
  const auto mdp = gen_garnet(4, 2, 4, 11, gamma);
  auto pc = base_config(gamma, 4);
  pc.state_exploration = false;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SampleStream stream(mdp, seed);
    const auto r = paramfree_run(stream, FeatureMap::identity(8), pc, &mdp);
    EXPECT_TRUE(r.certified) << "seed " << seed;
  }
}

TEST(Paramfree, EpochCostsNonDecreasing) {
  const auto fmap = FeatureMap::identity(8);
  const auto d = desk();
  std::int64_t prev_n = 0, prev_t = 0;
  for (int ep = 0; ep <= doubling_epochs(0.03125); ++ep) {
    const auto c = synth_params(0.75, fmap, 2, 4, 0.5, 0.1, std::ldexp(1.0, -ep), d);
    EXPECT_GE(c.N, prev_n);
    EXPECT_GE(c.T, prev_t);
    prev_n = c.N;
    prev_t = c.T;
  }
}
