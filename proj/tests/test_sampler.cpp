#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <autoexplore/errors.hpp>
#include <autoexplore/generators.hpp>
#include <autoexplore/sampler.hpp>

using namespace autoexplore;
using Eigen::MatrixXd;

namespace {

TabularMdp one_state_one_action(double cost, double gamma) {
  return TabularMdp(1, 1, MatrixXd::Ones(1, 1), MatrixXd::Constant(1, 1, cost), gamma);
}

std::vector<Transition> constant_window(int length, double cost) {
  return std::vector<Transition>(static_cast<std::size_t>(length), Transition{0, 0, cost, 0});
}

Policy skewed_policy(int n_states) {
  MatrixXd probs(n_states, 2);
  probs.col(0).setConstant(0.95);
  probs.col(1).setConstant(0.05);
  return Policy(probs);
}

struct Moments {
  MatrixXd sum, sum_sq;
  int n = 0;
  void add(const MatrixXd& x) {
    if (n == 0) {
      sum = MatrixXd::Zero(x.rows(), x.cols());
      sum_sq = sum;
    }
    sum += x;
    sum_sq += x.cwiseProduct(x);
    ++n;
  }
  MatrixXd mean() const { return sum / n; }
  MatrixXd se() const {
    const MatrixXd m = mean();
    return ((sum_sq / n - m.cwiseProduct(m)).cwiseMax(0.0) / n).cwiseSqrt();
  }
};

}  // namespace

TEST(SampleStream, SeedDeterminism) {
  const auto mdp = gen_garnet(6, 3, 3, 1, 0.9);
  const auto pi = Policy::uniform(6, 3);
  SampleStream a(mdp, 42), b(mdp, 42);
  for (int t = 0; t < 10000; ++t) {
    const auto x = a.step(pi);
    const auto y = b.step(pi);
    ASSERT_EQ(x.state, y.state);
    ASSERT_EQ(x.action, y.action);
    ASSERT_EQ(x.next_state, y.next_state);
  }
  EXPECT_EQ(a.samples(), 10000);
}

TEST(SampleStream, DeterministicOrbitAndSingleState) {
  MatrixXd p(3, 3);
  p << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  const TabularMdp cycle(3, 1, p, MatrixXd::Zero(3, 1), 0.5);
  SampleStream stream(cycle, 1, 0);
  for (int t = 0; t < 30; ++t) {
    EXPECT_EQ(stream.step(Policy::uniform(3, 1)).next_state, (t + 1) % 3);
  }
  const auto one = one_state_one_action(1.0, 0.5);
  SampleStream s1(one, 3);
  for (int t = 0; t < 10; ++t) {
    EXPECT_EQ(s1.step(Policy::uniform(1, 1)).next_state, 0);
  }
}

TEST(SampleStream, BudgetEnforced) {
  const auto one = one_state_one_action(1.0, 0.5);
  SampleStream s(one, 3, 0, 5);
  for (int t = 0; t < 5; ++t) {
    s.step(Policy::uniform(1, 1));
  }
  EXPECT_THROW(s.step(Policy::uniform(1, 1)), BudgetExceeded);
}

TEST(Nonrare, Examples) {
  EXPECT_EQ(nonrare_set(Policy::uniform(3, 2), 0.4).size(), 6u);
  const std::vector<int> acts{1, 0, 1};
  const auto det = Policy::deterministic(acts, 2);
  EXPECT_EQ(nonrare_set(det, 0.5), (std::vector<int>{1, 2, 5}));
  EXPECT_TRUE(nonrare_set(det, 1.5).empty());
}

TEST(Tomc, ClosedFormExamples) {
  const Policy pi = Policy::uniform(1, 1);
  const auto w = constant_window(3, 1.0);
  EXPECT_NEAR(tomc_estimate(w, pi, 0.5, 0.5)(0, 0), 1.75, 1e-15);
  // Threshold above one makes the only pair rare.
  EXPECT_EQ(tomc_estimate(w, pi, 1.5, 0.5)(0, 0), 2.0);
  EXPECT_EQ(tomc_estimate(std::vector<Transition>{}, Policy::uniform(2, 2), 0.1, 0.5).sum(), 0.0);
}

TEST(Tomc, Bounded) {
  const auto mdp = gen_garnet(5, 2, 2, 4, 0.8);
  SampleStream stream(mdp, 9);
  std::vector<Transition> w;
  for (int t = 0; t < 500; ++t) {
    w.push_back(stream.step(Policy::uniform(5, 2)));
  }
  const auto q = tomc_estimate(w, Policy::uniform(5, 2), 0.2, 0.8);
  EXPECT_GE(q.minCoeff(), 0.0);
  EXPECT_LE(q.maxCoeff(), 5.0 + 1e-12);
}

TEST(DiscountedHitting, Examples) {
  EXPECT_EQ(discounted_hitting(10, 10, 0.9), 1.0);
  EXPECT_NEAR(discounted_hitting(10, 3, 0.9), std::pow(0.9, 7), 1e-15);
  EXPECT_NEAR(discounted_hitting(10, 3, 0.9), 0.47830, 1e-5);
  EXPECT_EQ(discounted_hitting(4, 1, 0.0), 0.0);
}

TEST(DynamicMixing, EmptySetUsesOneStep) {
  const auto mdp = gen_garnet(3, 2, 2, 2, 0.7);
  SampleStream stream(mdp, 1);
  const auto r = dynamic_mixing_collect(stream, Policy::uniform(3, 2), 0.1, 1.5);
  EXPECT_EQ(r.m_used, 1);
  EXPECT_EQ(r.max_discounted_hitting, 0.0);
  EXPECT_EQ(r.samples, 1);
}

TEST(DynamicMixing, SingleStateClosedForm) {
  const auto mdp = one_state_one_action(1.0, 0.5);
  SampleStream stream(mdp, 1);
  const auto r = dynamic_mixing_collect(stream, Policy::uniform(1, 1), 0.1, 0.5);
  EXPECT_EQ(r.m_used, 5);
  EXPECT_EQ(r.samples, 5);
  EXPECT_NEAR(r.q(0, 0), 2.0 - std::pow(0.5, 4), 1e-15);
  EXPECT_LE(r.max_discounted_hitting, 0.1 * 0.5);
}

TEST(DynamicMixing, BiasWithinHittingBound) {
  const double gamma = 0.8;
  const auto mdp = gen_garnet(4, 2, 4, 3, gamma);
  const auto pi = Policy::uniform(4, 2);
  const MatrixXd q_true = exact_q(mdp, pi);
  SampleStream stream(mdp, 77);
  Moments mom;
  double hitting = 0.0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    const std::int64_t before = stream.samples();
    const auto res = dynamic_mixing_collect(stream, pi, 0.05, 0.1);
    ASSERT_EQ(res.samples, stream.samples() - before);
    mom.add(res.q);
    hitting += res.max_discounted_hitting;
  }
  const double bound = (hitting / reps) / (1.0 - gamma);
  const MatrixXd err = (mom.mean() - q_true).cwiseAbs();
  const MatrixXd allowed = (mom.se() * 3.0).array() + bound;
  EXPECT_TRUE((err.array() <= allowed.array()).all()) << err << "\n" << allowed;
}

TEST(TwoPhase, DeterministicPolicyMatchesCollect) {
  const auto mdp = gen_garnet(4, 1, 3, 5, 0.7);
  const auto pi = Policy::uniform(4, 1);
  SampleStream a(mdp, 8), b(mdp, 8);
  const auto one = dynamic_mixing_collect(a, pi, 0.05, 0.5);
  const auto two = two_phase_estimate(b, pi, 0.05, 0.5, 0.3);
  EXPECT_EQ(one.q, two.q);
  EXPECT_EQ(two.rare_pairs, 0);
  EXPECT_EQ(two.phase2_samples, 0);
  EXPECT_EQ(one.samples, two.samples);
}

TEST(TwoPhase, UniformExplorationTerminates) {
  const auto mdp = gen_garnet(5, 2, 2, 6, 0.8);
  SampleStream stream(mdp, 4, 0, 1'000'000);
  const auto r = two_phase_estimate(stream, skewed_policy(5), 0.1, 0.1, 1.0);
  EXPECT_EQ(r.rare_pairs, 5);
  EXPECT_EQ(r.samples, stream.samples());
}

TEST(TwoPhase, UnbiasedWithinVarsigma) {
  const double gamma = 0.8;
  const double varsigma = 0.05;
  const auto mdp = gen_garnet(4, 2, 4, 8, gamma);
  const auto pi = skewed_policy(4);
  const MatrixXd q_true = exact_q(mdp, pi);
  SampleStream stream(mdp, 31);
  Moments mom;
  for (int r = 0; r < 2000; ++r) {
    mom.add(two_phase_estimate(stream, pi, varsigma, 0.1, 0.5).q);
  }
  const MatrixXd err = (mom.mean() - q_true).cwiseAbs();
  const MatrixXd allowed = (mom.se() * 3.0).array() + varsigma;
  EXPECT_TRUE((err.array() <= allowed.array()).all()) << err << "\n" << allowed;
}

TEST(Perturb, ActionPolicy) {
  const std::vector<int> acts{0, 1};
  const auto det = Policy::deterministic(acts, 2);
  EXPECT_EQ(perturb_action_policy(det, 0.0).probs(), det.probs());
  EXPECT_NEAR(perturb_action_policy(det, 1.0)(0, 1), 0.5, 1e-15);
  const auto p = perturb_action_policy(det, 0.2);
  EXPECT_NEAR(p(0, 0), 0.9, 1e-15);
  EXPECT_NEAR(p(0, 1), 0.1, 1e-15);
}

TEST(Perturb, StatePolicy) {
  const std::vector<int> acts{0, 0, 0, 0};
  const auto det = Policy::deterministic(acts, 2);
  EXPECT_EQ(perturb_state_policy(det, 0.0).probs(), det.probs());
  const auto p = perturb_state_policy(det, 0.2);
  EXPECT_NEAR(p(0, 0), 0.85 / 0.9, 1e-15);
  EXPECT_NEAR(p(0, 1), 0.05 / 0.9, 1e-15);
  const std::vector<int> acts2{0, 1};
  const auto square = Policy::deterministic(acts2, 2);
  EXPECT_LT((perturb_state_policy(square, 0.3).probs() -
             perturb_action_policy(square, 0.3).probs()).cwiseAbs().maxCoeff(), 1e-15);
}
