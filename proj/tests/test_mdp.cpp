#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include <autoexplore/errors.hpp>
#include <autoexplore/generators.hpp>
#include <autoexplore/mdp.hpp>
#include <autoexplore/mdp_io.hpp>
#include <autoexplore/rng.hpp>

using namespace autoexplore;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

TabularMdp single_state(double cost, double gamma, int n_actions = 1) {
  MatrixXd p = MatrixXd::Ones(n_actions, 1);
  MatrixXd c = MatrixXd::Constant(1, n_actions, cost);
  return TabularMdp(1, n_actions, p, c, gamma);
}

// Two states, one action, deterministic swap.
TabularMdp two_cycle(double gamma) {
  MatrixXd p(2, 2);
  p << 0, 1, 1, 0;
  MatrixXd c(2, 1);
  c << 0, 1;
  return TabularMdp(2, 1, p, c, gamma);
}

Policy random_policy(int n_states, int n_actions, std::uint64_t seed) {
  CounterRng rng(seed, 5);
  MatrixXd probs(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      probs(s, a) = rng.exponential();
    }
    probs.row(s) /= probs.row(s).sum();
  }
  return Policy(probs);
}

}  // namespace

TEST(Mdp, RejectsBadInputs) {
  MatrixXd p(1, 1);
  p << 0.5;
  EXPECT_THROW(TabularMdp(1, 1, p, MatrixXd::Ones(1, 1), 0.5), std::invalid_argument);
  EXPECT_THROW(single_state(1.5, 0.5), std::invalid_argument);
  EXPECT_THROW(single_state(0.5, 1.0), std::invalid_argument);
  EXPECT_THROW(Policy(MatrixXd::Constant(2, 2, 0.4)), std::invalid_argument);
}

TEST(ExactValue, SingleStateGeometricSeries) {
  const auto mdp = single_state(1.0, 0.5);
  const auto pi = Policy::uniform(1, 1);
  EXPECT_NEAR(exact_value(mdp, pi)(0), 2.0, 1e-12);
  EXPECT_NEAR(exact_q(mdp, pi)(0, 0), 2.0, 1e-12);
}

TEST(ExactValue, ZeroDiscountIsExpectedCost) {
  const auto mdp = gen_garnet(5, 3, 2, 4, 0.0);
  const auto pi = random_policy(5, 3, 1);
  const VectorXd v = exact_value(mdp, pi);
  const MatrixXd q = exact_q(mdp, pi);
  for (int s = 0; s < 5; ++s) {
    EXPECT_NEAR(v(s), mdp.cost().row(s).dot(pi.row(s)), 1e-12);
  }
  EXPECT_LT((q - mdp.cost()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExactValue, SymmetricChainMatchesRollouts) {
  MatrixXd p = MatrixXd::Constant(4, 2, 0.5);
  MatrixXd c(2, 2);
  c << 0, 0, 1, 1;
  const TabularMdp mdp(2, 2, p, c, 0.9);
  const auto pi = Policy::uniform(2, 2);
  const VectorXd v = exact_value(mdp, pi);
  // Closed form: V(s) = s + 0.9 * 0.5 / 0.1.
  EXPECT_NEAR(v(0), 4.5, 1e-10);
  EXPECT_NEAR(v(1), 5.5, 1e-10);

  CounterRng rng(3, 0);
  const int runs = 4000;
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < runs; ++r) {
    int s = 0;
    double total = 0.0, disc = 1.0;
    for (int t = 0; t < 300; ++t) {
      total += disc * s;
      disc *= 0.9;
      s = rng.uniform() < 0.5 ? 0 : 1;
    }
    sum += total;
    sum_sq += total * total;
  }
  const double mean = sum / runs;
  const double se = std::sqrt((sum_sq / runs - mean * mean) / runs);
  EXPECT_LE(std::abs(mean - v(0)), 3 * se + 1e-9);
}

TEST(ExactQ, MatchesTruncatedUnroll) {
  const auto mdp = gen_garnet(5, 2, 3, 0, 0.9);
  const auto pi = random_policy(5, 2, 2);
  const MatrixXd q = exact_q(mdp, pi);
  const MatrixXd kernel = policy_kernel(mdp, pi);
  const VectorXd c_pi = policy_cost(mdp, pi, Regularizer::none());
  const int horizon = 200;
  for (int s = 0; s < 5; ++s) {
    for (int a = 0; a < 2; ++a) {
      // Start from (s, a), then follow pi.
      double total = mdp.cost(s, a);
      Eigen::RowVectorXd dist = mdp.transition_row(s, a);
      double disc = mdp.gamma();
      for (int t = 1; t < horizon; ++t) {
        total += disc * dist.dot(c_pi);
        dist = dist * kernel;
        disc *= mdp.gamma();
      }
      EXPECT_NEAR(q(s, a), total, std::pow(0.9, horizon) / 0.1 + 1e-12);
    }
  }
}

TEST(ExactQ, BellmanConsistency) {
  const auto mdp = gen_garnet(6, 3, 3, 8, 0.85);
  const auto pi = random_policy(6, 3, 3);
  const auto h = Regularizer::negative_entropy(0.1, 1.0);
  const VectorXd v = exact_value(mdp, pi, h);
  const MatrixXd q = exact_q(mdp, pi, h);
  const VectorXd hv = regularizer_values(pi, h);
  for (int s = 0; s < 6; ++s) {
    EXPECT_NEAR(v(s), q.row(s).dot(pi.row(s)), 1e-10);
    for (int a = 0; a < 3; ++a) {
      const double rhs = mdp.cost(s, a) + hv(s) + mdp.gamma() * mdp.transition_row(s, a).dot(v);
      EXPECT_NEAR(q(s, a), rhs, 1e-10);
    }
  }
}

TEST(SolveOptimal, SingleActionIsThatPolicy) {
  const auto mdp = gen_garnet(4, 1, 2, 1, 0.7);
  const auto sol = solve_optimal(mdp);
  EXPECT_LT((sol.value - exact_value(mdp, Policy::uniform(4, 1))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveOptimal, ZeroDiscountIsArgminWithLowTies) {
  MatrixXd p = MatrixXd::Constant(4, 2, 0.5);
  MatrixXd c(2, 2);
  c << 0.3, 0.1, 0.4, 0.4;
  const TabularMdp mdp(2, 2, p, c, 0.0);
  const auto sol = solve_optimal(mdp);
  EXPECT_EQ(sol.policy(0, 1), 1.0);
  EXPECT_EQ(sol.policy(1, 0), 1.0);
}

TEST(SolveOptimal, MatchesPolicyIteration) {
  const auto mdp = gen_garnet(5, 3, 3, 0, 0.9);
  const auto sol = solve_optimal(mdp);
  Policy pi = Policy::uniform(5, 3);
  for (int it = 0; it < 100; ++it) {
    Policy next = greedy_policy(exact_q(mdp, pi));
    if (next.probs() == pi.probs()) {
      break;
    }
    pi = next;
  }
  EXPECT_EQ(pi.probs(), sol.policy.probs());
  EXPECT_LT((exact_value(mdp, pi) - sol.value).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveOptimal, DominatesRandomPolicies) {
  const auto mdp = gen_garnet(6, 3, 2, 17, 0.8);
  const auto sol = solve_optimal(mdp);
  for (int i = 0; i < 30; ++i) {
    const VectorXd v = exact_value(mdp, random_policy(6, 3, 100 + i));
    EXPECT_LE((sol.value - v).maxCoeff(), 1e-8);
  }
}

TEST(Advantage, CollapsesAtPolicyAndIsNonPositiveAtGreedy) {
  const auto mdp = gen_garnet(4, 3, 2, 6, 0.8);
  const auto pi = random_policy(4, 3, 7);
  const MatrixXd q = exact_q(mdp, pi);
  for (int s = 0; s < 4; ++s) {
    EXPECT_NEAR(advantage(mdp, pi, Regularizer::none(), s, pi.row(s).transpose()), 0.0, 1e-12);
    Eigen::Index best = 0;
    q.row(s).minCoeff(&best);
    VectorXd point = VectorXd::Zero(3);
    point(best) = 1.0;
    EXPECT_LE(advantage(mdp, pi, Regularizer::none(), s, point), 1e-12);
  }
}

TEST(Advantage, PerformanceDifference) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto mdp = gen_garnet(5, 3, 3, seed, 0.85);
    const auto pi = random_policy(5, 3, 2 * seed);
    const auto pi2 = random_policy(5, 3, 2 * seed + 1);
    const VectorXd v = exact_value(mdp, pi);
    const VectorXd v2 = exact_value(mdp, pi2);
    const MatrixXd kappa = visitation_matrix(mdp, pi2);
    VectorXd psi(5);
    for (int q = 0; q < 5; ++q) {
      psi(q) = advantage(mdp, pi, Regularizer::none(), q, pi2.row(q).transpose());
    }
    for (int s = 0; s < 5; ++s) {
      EXPECT_NEAR(v2(s) - v(s), kappa.row(s).dot(psi) / (1 - mdp.gamma()), 1e-8);
    }
  }
}

TEST(Visitation, ZeroDiscountIsPointMass) {
  const auto mdp = gen_garnet(4, 2, 2, 1, 0.0);
  const VectorXd k = discounted_visitation(mdp, Policy::uniform(4, 2), 2);
  EXPECT_NEAR(k(2), 1.0, 1e-12);
  EXPECT_NEAR(k.sum(), 1.0, 1e-12);
}

TEST(Visitation, SingleState) {
  const auto mdp = single_state(0.5, 0.9);
  EXPECT_NEAR(discounted_visitation(mdp, Policy::uniform(1, 1), 0)(0), 1.0, 1e-12);
  EXPECT_NEAR(mixed_visitation(mdp, Policy::uniform(1, 1), 0, 1.0)(0), 1.0, 1e-12);
}

TEST(Visitation, DeterministicTwoCycle) {
  const auto mdp = two_cycle(0.5);
  const VectorXd k = discounted_visitation(mdp, Policy::uniform(2, 1), 0);
  EXPECT_NEAR(k(0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(k(1), 1.0 / 3.0, 1e-12);
}

TEST(Visitation, MixedFloorAndZeroFrequency) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto mdp = gen_garnet(5, 2, 2, seed, 0.9);
    const auto pi = random_policy(5, 2, seed);
    const VectorXd mixed = mixed_visitation(mdp, pi, 0, 0.3);
    EXPECT_NEAR(mixed.sum(), 1.0, 1e-12);
    EXPECT_GE(mixed.minCoeff(), 0.3 * 0.1 / 5 - 1e-15);
    const VectorXd pure = mixed_visitation(mdp, pi, 1, 0.0);
    EXPECT_LT((pure - discounted_visitation(mdp, pi, 1)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_GE(pure.minCoeff(), 0.0);
  }
}

TEST(Visitation, TimeShift) {
  const auto mdp = gen_garnet(4, 2, 3, 9, 0.7);
  const auto pi = random_policy(4, 2, 9);
  const int n = 4, na = 2;
  for (int q = 0; q < n; ++q) {
    const VectorXd kappa = discounted_visitation(mdp, pi, q);
    for (int s2 = 0; s2 < n; ++s2) {
      for (int a2 = 0; a2 < na; ++a2) {
        double lhs = 0.0;
        for (int s = 0; s < n; ++s) {
          for (int a = 0; a < na; ++a) {
            lhs += kappa(s) * pi(s, a) * mdp.transition(s, a, s2) * pi(s2, a2);
          }
        }
        EXPECT_LE(lhs, kappa(s2) * pi(s2, a2) / mdp.gamma() + 1e-12);
      }
    }
  }
}

TEST(Stationary, Examples) {
  MatrixXd doubly(2, 2);
  doubly << 0.3, 0.7, 0.7, 0.3;
  EXPECT_NEAR(stationary_distribution(doubly)(0), 0.5, 1e-12);
  MatrixXd flip(2, 2);
  flip << 0, 1, 1, 0;
  const VectorXd nu = stationary_distribution(flip);
  EXPECT_NEAR(nu(0), 0.5, 1e-12);
  EXPECT_NEAR(nu(1), 0.5, 1e-12);
  EXPECT_THROW(stationary_distribution(MatrixXd::Identity(2, 2)), NotIrreducible);
  EXPECT_FALSE(is_irreducible(MatrixXd::Identity(2, 2)));
  EXPECT_TRUE(is_irreducible(flip));
}

TEST(Mixing, OneStepStationary) {
  MatrixXd p(3, 3);
  p.rowwise() = Eigen::RowVector3d(0.2, 0.3, 0.5);
  const auto prof = mixing_profile(p, 20);
  EXPECT_NEAR(prof.distances.at(1), 0.0, 1e-14);
  EXPECT_LT(prof.rate, 1e-6);
}

TEST(Mixing, FlipChainNotGeometric) {
  MatrixXd flip(2, 2);
  flip << 0, 1, 1, 0;
  EXPECT_FALSE(mixing_profile(flip, 20).is_geometric);
}

TEST(Mixing, LazyFlipRate) {
  MatrixXd p(2, 2);
  p << 0.6, 0.4, 0.4, 0.6;
  const auto prof = mixing_profile(p, 30);
  EXPECT_TRUE(prof.is_geometric);
  EXPECT_NEAR(prof.rate, 0.2, 1e-6);
  EXPECT_NEAR(prof.slem, 0.2, 1e-12);
  EXPECT_NEAR(prof.distances.at(3), 0.5 * std::pow(0.2, 3), 1e-12);
}

TEST(Mixing, BlockLength) {
  EXPECT_EQ(mixing_block_length(0.25, 0.5), 4);
}

TEST(Mixing, ImplicitBoundsCollapseAtOne) {
  MixingProfile prof;
  prof.stationary = VectorXd::Constant(2, 0.25);
  prof.rate = 0.5;
  prof.is_geometric = true;
  const auto b = implicit_mixing_bounds(prof, 1.0);
  EXPECT_EQ(b.block_length, 4);
  EXPECT_NEAR(b.rate_bound, 1.0 - 0.25 * 0.25 / 8.0, 1e-12);
  EXPECT_NEAR(b.stationary_floor, 0.125, 1e-12);
}

TEST(MdpIo, RoundTrip) {
  const auto mdp = gen_garnet(4, 3, 2, 5, 0.75);
  const auto back = mdp_from_json(mdp_to_json(mdp));
  EXPECT_EQ(back.n_states(), 4);
  EXPECT_EQ(back.n_actions(), 3);
  EXPECT_EQ(back.gamma(), 0.75);
  EXPECT_EQ(back.transition(), mdp.transition());
  EXPECT_EQ(back.cost(), mdp.cost());
}

TEST(MdpIo, NamesBadField) {
  auto doc = mdp_to_json(gen_garnet(3, 2, 2, 5, 0.75));
  doc["gamma"] = "x";
  try {
    mdp_from_json(doc);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos);
  }
}

TEST(Generators, HardChainShape) {
  const auto mdp = gen_hard_chain(5, 0.2, 0.9);
  EXPECT_EQ(mdp.n_actions(), 2);
  EXPECT_NEAR(mdp.transition(2, 1, 3), 0.8, 1e-12);
  EXPECT_NEAR(mdp.transition(2, 0, 1), 1.0, 1e-12);
  EXPECT_EQ(mdp.cost(4, 0), 0.0);
  EXPECT_EQ(mdp.cost(0, 0), 0.8);
}

TEST(Generators, GarnetDeterministicAndBranching) {
  const auto a = gen_garnet(6, 2, 3, 21, 0.9);
  const auto b = gen_garnet(6, 2, 3, 21, 0.9);
  EXPECT_EQ(a.transition(), b.transition());
  for (int z = 0; z < a.n_pairs(); ++z) {
    EXPECT_EQ((a.transition().row(z).array() > 0).count(), 3);
  }
}
