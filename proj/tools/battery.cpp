#include "battery.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include <unistd.h>

#include <autoexplore/certificate.hpp>
#include <autoexplore/errors.hpp>
#include <autoexplore/generators.hpp>
#include <autoexplore/linear_fa.hpp>
#include <autoexplore/mirror_descent.hpp>
#include <autoexplore/paramfree.hpp>
#include <autoexplore/rng.hpp>
#include <autoexplore/sampler.hpp>
#include <autoexplore/tabular.hpp>

#include "commands.hpp"

namespace autoexplore::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

CheckResult result(bool passed, std::string detail) { return {0, {}, passed, std::move(detail)}; }

Eigen::VectorXd random_simplex(CounterRng& rng, int n) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.exponential();
  }
  return x / x.sum();
}

/// Log-normal weights; a large spread puts points near the simplex vertices.
Eigen::VectorXd spread_simplex(CounterRng& rng, int n, double spread) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = std::exp(spread * rng.normal());
  }
  return x / x.sum();
}

Policy random_policy(CounterRng& rng, int n_states, int n_actions) {
  Eigen::MatrixXd p(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    p.row(s) = random_simplex(rng, n_actions).transpose();
  }
  return Policy(p);
}

double random_gamma(CounterRng& rng) {
  static constexpr double choices[] = {0.5, 0.7, 0.8, 0.9, 0.95};
  return choices[rng.uniform_int(5)];
}

TabularMdp random_garnet(CounterRng& rng, int max_states, int max_actions, double gamma) {
  const int n_states = 2 + rng.uniform_int(max_states - 1);
  const int n_actions = 2 + rng.uniform_int(max_actions - 1);
  const int branching = 1 + rng.uniform_int(n_states);
  return gen_garnet(n_states, n_actions, branching, rng(), gamma);
}

// Policy iteration with strict-improvement switching, independent of the value-iteration path.
ValueFunction policy_iteration_value(const TabularMdp& mdp) {
  std::vector<int> actions(static_cast<std::size_t>(mdp.n_states()), 0);
  for (int round = 0; round < 10'000; ++round) {
    const Policy pi = Policy::deterministic(actions, mdp.n_actions());
    const ValueFunction v = exact_value(mdp, pi);
    const QFunction q = q_from_value(mdp, pi, Regularizer::none(), v);
    bool changed = false;
    for (int s = 0; s < mdp.n_states(); ++s) {
      int best = actions[static_cast<std::size_t>(s)];
      for (int a = 0; a < mdp.n_actions(); ++a) {
        if (q(s, a) < q(s, best) - 1e-12) {
          best = a;
        }
      }
      if (best != actions[static_cast<std::size_t>(s)]) {
        actions[static_cast<std::size_t>(s)] = best;
        changed = true;
      }
    }
    if (!changed) {
      return v;
    }
  }
  throw NumericError("policy iteration did not stabilize");
}

CheckResult check_oracles() {
  CounterRng rng(101, 1);
  double worst_excess = -1.0;
  double worst_pi_vi = 0.0;
  for (int i = 0; i < 20; ++i) {
    const TabularMdp mdp = random_garnet(rng, 10, 4, random_gamma(rng));
    const Policy pi = random_policy(rng, mdp.n_states(), mdp.n_actions());
    const double g = mdp.gamma();
    const ValueFunction v = exact_value(mdp, pi);
    const QFunction q = exact_q(mdp, pi);

    // Sum_{t < 200} gamma^t P^t c by repeated application, then one Bellman backup for Q.
    const Eigen::MatrixXd kernel = policy_kernel(mdp, pi);
    const Eigen::VectorXd c = policy_cost(mdp, pi, Regularizer::none());
    Eigen::VectorXd unrolled = Eigen::VectorXd::Zero(mdp.n_states());
    Eigen::VectorXd previous = unrolled;
    Eigen::VectorXd term = c;
    double discount = 1.0;
    for (int t = 0; t < 200; ++t) {
      previous = unrolled;
      unrolled += discount * term;
      term = kernel * term;
      discount *= g;
    }
    QFunction q_unrolled(mdp.n_states(), mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
      for (int a = 0; a < mdp.n_actions(); ++a) {
        q_unrolled(s, a) = mdp.cost(s, a) + g * mdp.transition_row(s, a).dot(previous);
      }
    }
    const double tol = std::pow(g, 200) / (1.0 - g) + 1e-12;
    const double err = std::max((v - unrolled).cwiseAbs().maxCoeff(),
                                (q - q_unrolled).cwiseAbs().maxCoeff());
    worst_excess = std::max(worst_excess, err - tol);

    const ValueFunction v_pi = policy_iteration_value(mdp);
    const ValueFunction v_vi = solve_optimal(mdp).value;
    worst_pi_vi = std::max(worst_pi_vi, (v_pi - v_vi).cwiseAbs().maxCoeff());
  }
  return result(worst_excess <= 0.0 && worst_pi_vi <= 1e-8,
                "worst unroll excess over tolerance " + num(worst_excess) +
                    ", max |V_pi - V_vi| " + num(worst_pi_vi));
}

CheckResult check_performance_difference() {
  CounterRng rng(202, 1);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const TabularMdp mdp = random_garnet(rng, 10, 4, random_gamma(rng));
    const Policy pi = random_policy(rng, mdp.n_states(), mdp.n_actions());
    const Policy pi2 = random_policy(rng, mdp.n_states(), mdp.n_actions());
    const Regularizer h =
        i % 2 == 0 ? Regularizer::none() : Regularizer::negative_entropy(0.1, 0.0);
    const ValueFunction v = exact_value(mdp, pi, h);
    const ValueFunction v2 = exact_value(mdp, pi2, h);
    const Eigen::MatrixXd kappa = visitation_matrix(mdp, pi2);
    Eigen::VectorXd psi(mdp.n_states());
    for (int s = 0; s < mdp.n_states(); ++s) {
      psi[s] = advantage(mdp, pi, h, s, pi2.row(s).transpose());
    }
    const Eigen::VectorXd rhs = kappa * psi / (1.0 - mdp.gamma());
    worst = std::max(worst, (v2 - v - rhs).cwiseAbs().maxCoeff());
  }
  return result(worst <= 1e-8, "max identity residual " + num(worst) + " over 50 triples");
}

CheckResult check_tsallis_bregman() {
  CounterRng rng(303, 1);
  static constexpr double spreads[] = {0.1, 1.0, 5.0};
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const double p : {0.1, 0.25, 0.5}) {
    const DistanceGenerator dgf = DistanceGenerator::tsallis(p);
    for (int i = 0; i < 10'000; ++i) {
      const int n = 2 + rng.uniform_int(5);
      const double spread = spreads[rng.uniform_int(3)];
      Eigen::VectorXd u = spread_simplex(rng, n, spread).array() + 1e-9;
      Eigen::VectorXd v = spread_simplex(rng, n, spread).array() + 1e-9;
      u /= u.sum();
      v /= v.sum();
      const double l1 = (u - v).lpNorm<1>();
      const double slack = bregman(dgf, u, v) - 0.5 * l1 * l1;
      worst = std::min(worst, slack);
      violations += slack < -1e-12;
    }
  }
  return result(violations == 0, std::to_string(violations) + " violations in 30000 pairs, min slack " +
                                     num(worst));
}

CheckResult check_gap_sandwich() {
  CounterRng rng(404, 1);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 50; ++i) {
    const TabularMdp mdp = random_garnet(rng, 10, 4, random_gamma(rng));
    const Policy pi = random_policy(rng, mdp.n_states(), mdp.n_actions());
    const Eigen::VectorXd g = exact_gap(mdp, pi);
    const ValueFunction excess = exact_value(mdp, pi) - solve_optimal(mdp).value;
    const double upper = g.maxCoeff() / (1.0 - mdp.gamma());
    for (int s = 0; s < mdp.n_states(); ++s) {
      worst = std::max({worst, g[s] - excess[s], excess[s] - upper});
    }
  }
  return result(worst <= 1e-10, "largest sandwich violation " + num(worst));
}

FeatureMap probe_features(CounterRng& rng, int i, const TabularMdp& mdp) {
  switch (i % 3) {
    case 0:
      return FeatureMap::identity(mdp.n_pairs());
    case 1:
      return FeatureMap::one_hot_state(mdp.n_states(), mdp.n_actions());
    default:
      return FeatureMap::random_gaussian(mdp.n_pairs(), 1 + rng.uniform_int(mdp.n_pairs()), rng());
  }
}

CheckResult check_operator_structure() {
  CounterRng rng(505, 1);
  int violations[4] = {0, 0, 0, 0};
  for (int i = 0; i < 20; ++i) {
    const TabularMdp mdp = random_garnet(rng, 8, 4, random_gamma(rng));
    const double g = mdp.gamma();
    const Policy pi = random_policy(rng, mdp.n_states(), mdp.n_actions());
    const FeatureMap fmap = probe_features(rng, i, mdp);
    const int s_or = rng.uniform_int(mdp.n_states());
    const double f = 0.5;
    const double eps_action = (1.0 - g) * mixed_visitation(mdp, pi, s_or, f).minCoeff() / 4.0;
    const WeightModel wm = build_weights(mdp, pi, fmap, s_or, f, eps_action);
    const Eigen::MatrixXd& phi = fmap.phi();
    const Eigen::MatrixXd kernel = pair_kernel(mdp, pi);
    const int d = fmap.dim();

    for (int probe = 0; probe < 1000; ++probe) {
      Eigen::VectorXd t1(d), t2(d), u(mdp.n_pairs());
      for (int j = 0; j < d; ++j) {
        t1[j] = 5.0 * rng.normal();
        t2[j] = 5.0 * rng.normal();
      }
      for (int z = 0; z < mdp.n_pairs(); ++z) {
        u[z] = rng.normal();
      }
      const Eigen::VectorXd dF = exact_F(mdp, pi, fmap, wm, t1) - exact_F(mdp, pi, fmap, wm, t2);
      const Eigen::VectorXd dt = t1 - t2;
      const double dq = weighted_norm(phi * dt, wm.w);
      const double scale = 1e-10 * (1.0 + dq * dq);
      violations[0] += dF.dot(dt) < (1.0 - g) / 4.0 * dq * dq - scale;
      violations[1] += dF.norm() > 2.0 * fmap.omega() * dq + 1e-10 * (1.0 + dq);
      const double pu = weighted_norm(kernel * u, wm.w);
      const double uu = weighted_norm(u, wm.w);
      violations[2] += pu * pu > std::pow(g, -1.5) * uu * uu * (1.0 + 1e-12);
    }
    const ProjectedBellmanSolution sol = solve_projected_bellman(mdp, pi, fmap, wm);
    violations[3] += weighted_norm(sol.q, wm.w) > 4.0 / (1.0 - g) + 1e-10;
  }
  const bool ok = violations[0] + violations[1] + violations[2] + violations[3] == 0;
  return result(ok, "violations: monotone " + std::to_string(violations[0]) + ", lipschitz " +
                        std::to_string(violations[1]) + ", kernel " +
                        std::to_string(violations[2]) + ", fixed-point norm " +
                        std::to_string(violations[3]));
}

CheckResult check_ctd_convergence() {
  const double gamma = 0.6;
  std::string detail;
  bool ok = true;
  for (int inst = 0; inst < 4; ++inst) {
    const TabularMdp mdp = gen_garnet(4, 2, 4, 100 + static_cast<std::uint64_t>(inst), gamma);
    const Policy pi = Policy::uniform(4, 2);
    const FeatureMap fmap = FeatureMap::identity(8);
    const int s_or = 0;
    const double f = 0.5;
    const double eps_action = (1.0 - gamma) * mixed_visitation(mdp, pi, s_or, f).minCoeff() / 4.0;
    const WeightModel wm = build_weights(mdp, pi, fmap, s_or, f, eps_action);
    const ProjectedBellmanSolution target = solve_projected_bellman(mdp, pi, fmap, wm);

    CtdConfig c;
    c.iota = CtdConfig::iota_cap(gamma, fmap.omega());
    const double t_theory = std::ceil(8.0 / ((1.0 - gamma) * c.iota * wm.mu));
    const auto t_desk = static_cast<std::int64_t>(std::ceil(t_theory / 100.0));
    c.N = 50 * t_desk;
    c.m = std::max<std::int64_t>(CtdConfig::mixing_floor(gamma, fmap.omega(), 4, wm.mu), 20);
    c.s_or = s_or;
    c.f = f;
    c.eps_state = 0.1;
    c.eps_action = eps_action;

    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SampleStream stream(mdp, seed);
      const CtdResult run = ctd_run(stream, pi, fmap, c);
      mean += weighted_norm(run.q_hat - target.q, wm.w) / 5.0;
    }
    const double tol = 0.05 / (1.0 - gamma);
    ok = ok && mean <= tol;
    detail += (inst ? ", " : "") + num(mean);
  }
  return result(ok, "mean W-errors " + detail + " (tolerance " + num(0.05 / (1.0 - gamma)) + ")");
}

CheckResult check_tomc_bias() {
  const double gamma = 0.7;
  const TabularMdp mdp = gen_garnet(4, 2, 4, 3, gamma);
  const Policy pi = Policy::uniform(4, 2);
  const QFunction q = exact_q(mdp, pi);
  SampleStream stream(mdp, 1);
  const int reps = 2000;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(4, 2);
  Eigen::MatrixXd sum_sq = sum;
  Eigen::MatrixXd hitting = sum;
  for (int r = 0; r < reps; ++r) {
    const CollectResult c = dynamic_mixing_collect(stream, pi, 0.1, 0.01);
    sum += c.q;
    sum_sq += c.q.cwiseProduct(c.q);
    for (int z = 0; z < mdp.n_pairs(); ++z) {
      hitting(z / 2, z % 2) +=
          discounted_hitting(c.m_used, c.hits.tau[static_cast<std::size_t>(z)], gamma);
    }
  }
  int violations = 0;
  double worst = 0.0;
  for (int s = 0; s < 4; ++s) {
    for (int a = 0; a < 2; ++a) {
      const double mean = sum(s, a) / reps;
      const double se = std::sqrt(std::max(sum_sq(s, a) / reps - mean * mean, 0.0) / reps);
      const double tol = hitting(s, a) / reps / (1.0 - gamma) + 3.0 * se;
      const double err = std::abs(mean - q(s, a));
      worst = std::max(worst, err / tol);
      violations += err > tol;
    }
  }
  return result(violations == 0, std::to_string(violations) +
                                     " pairs outside the bias band, largest error/band " + num(worst));
}

CheckResult check_gap_concentration() {
  const double gamma = 0.6;
  const double delta = 0.2;
  const double varsigma = 0.02;
  const int m = 200;
  const TabularMdp mdp = gen_garnet(4, 2, 4, 5, gamma);
  const Policy pi = Policy::uniform(4, 2);
  const Eigen::VectorXd g = exact_gap(mdp, pi);
  const double bound = 2.0 / (1.0 - gamma) *
                           std::sqrt(2.0 * std::log(2.0 * mdp.n_pairs() / delta)) / std::sqrt(m) +
                       2.0 * varsigma;
  int failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    SampleStream stream(mdp, 1000 + static_cast<std::uint64_t>(trial));
    const GapEstimate est = estimate_gap(stream, pi, varsigma, m, 0.01, 0.01);
    const double err = (est.g_hat - g).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    failures += err > bound;
  }
  return result(failures <= delta * 500, std::to_string(failures) + "/500 trials beyond " +
                                             num(bound) + ", worst error " + num(worst));
}

CheckResult check_implicit_mixing() {
  CounterRng rng(909, 1);
  int accepted = 0;
  int attempts = 0;
  int violations = 0;
  double worst_rate_margin = std::numeric_limits<double>::infinity();
  double worst_floor_margin = std::numeric_limits<double>::infinity();
  while (accepted < 30) {
    if (++attempts > 2000) {
      return result(false, "only " + std::to_string(accepted) + " instances met the assumption");
    }
    const int n_states = 3 + rng.uniform_int(4);
    const int n_actions = 2 + rng.uniform_int(2);
    const int branching = 2 + rng.uniform_int(n_states - 1);
    const TabularMdp mdp = gen_garnet(n_states, n_actions, branching, rng(), 0.9);
    const OptimalSolution star = solve_optimal(mdp);
    const Eigen::MatrixXd kernel_star = policy_kernel(mdp, star.policy);
    if (!is_irreducible(kernel_star)) {
      continue;
    }
    MixingProfile profile = mixing_profile(kernel_star, 500);
    if (!profile.is_geometric || profile.min_stationary() <= 0.0) {
      continue;
    }
    // A slower rate keeps the envelope under 2, so clamping up to 1/2 stays valid.
    if (profile.rate < 0.5) {
      profile.rate = 0.5;
    }
    ++accepted;
    std::vector<int> best(static_cast<std::size_t>(n_states));
    for (int s = 0; s < n_states; ++s) {
      star.policy.row(s).maxCoeff(&best[static_cast<std::size_t>(s)]);
    }
    for (const double floor_pi : {0.05, 0.2}) {
      const ImplicitMixingBounds bounds = implicit_mixing_bounds(profile, floor_pi);
      for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd probs(n_states, n_actions);
        for (int s = 0; s < n_states; ++s) {
          Eigen::VectorXd row;
          if (trial == 0) {
            // Extreme case: exactly the floor on the optimal action.
            row = Eigen::VectorXd::Constant(n_actions, (1.0 - floor_pi) / (n_actions - 1));
          } else {
            row = (1.0 - floor_pi) * random_simplex(rng, n_actions);
          }
          if (trial == 0) {
            row[best[static_cast<std::size_t>(s)]] = floor_pi;
          } else {
            row[best[static_cast<std::size_t>(s)]] += floor_pi;
          }
          probs.row(s) = row.transpose();
        }
        const MixingProfile measured = mixing_profile(policy_kernel(mdp, Policy(probs)), 500);
        const double rate_margin = bounds.rate_bound - measured.rate;
        const double floor_margin = measured.min_stationary() - bounds.stationary_floor;
        worst_rate_margin = std::min(worst_rate_margin, rate_margin);
        worst_floor_margin = std::min(worst_floor_margin, floor_margin);
        violations += rate_margin < 0.0 || floor_margin < 0.0;
      }
    }
  }
  return result(violations == 0,
                std::to_string(violations) + " violations on 30 instances (" +
                    std::to_string(attempts) + " drawn), min rate margin " +
                    num(worst_rate_margin) + ", min floor margin " + num(worst_floor_margin));
}

CheckResult check_tabular_end_to_end() {
  const TabularMdp mdp = gen_garnet(5, 3, 3, 0, 0.8);
  TabularAutoConfig cfg = theorem_params(0.8, 3, 5, 0.5, 0.1);
  cfg.anytime = true;
  cfg.k = 2000;
  SampleStream stream(mdp, 0);
  const TabularRunResult run = run_tabular_autoexplore(stream, cfg, &mdp);
  const double initial = run.record.summary().at("initial_gap_linf").get<double>();
  const double final_gap = run.record.summary().at("final_gap_linf").get<double>();
  const bool ok = run.record.size() == 2000 && std::isfinite(final_gap) &&
                  final_gap <= 0.25 * initial && run.total_samples == stream.samples();
  return result(ok, "gap " + num(initial) + " -> " + num(final_gap) + ", samples " +
                        std::to_string(run.total_samples) + " (stream " +
                        std::to_string(stream.samples()) + ")");
}

DeskScale paramfree_desk() {
  DeskScale desk;
  desk.k_div = 1e7;
  desk.t_div = 1e3;
  desk.n_div = 1e6;
  desk.cert_div = 10.0;
  return desk;
}

CheckResult check_paramfree_end_to_end() {
  const double gamma = 0.6;
  static constexpr int shapes[3][3] = {{4, 2, 4}, {5, 2, 5}, {5, 3, 3}};
  int certified = 0;
  int within = 0;
  double worst_ratio = 0.0;
  for (int inst = 0; inst < 3; ++inst) {
    const TabularMdp mdp = gen_garnet(shapes[inst][0], shapes[inst][1], shapes[inst][2],
                                      11 + static_cast<std::uint64_t>(inst), gamma);
    const FeatureMap fmap = FeatureMap::identity(mdp.n_pairs());
    ParamfreeConfig pc;
    pc.epsilon = 0.5;
    pc.delta = 0.2;
    pc.f = 0.5;
    pc.underline_kappa = kappa_preset_with_frequency(gamma, pc.f, mdp.n_states());
    pc.desk = paramfree_desk();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SampleStream stream(mdp, seed);
      const ParamfreeResult run = paramfree_run(stream, fmap, pc, &mdp);
      const double bound = certified_gap_bound(pc.epsilon, gamma, static_cast<double>(run.k),
                                               mdp.n_states(), pc.delta);
      certified += run.certified;
      within += run.certified && run.final_gap_oracle <= bound;
      worst_ratio = std::max(worst_ratio, run.final_gap_oracle / bound);
    }
  }
  return result(certified == 15 && within == 15,
                std::to_string(certified) + "/15 certified, " + std::to_string(within) +
                    "/15 within the gap bound, largest gap/bound " + num(worst_ratio));
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    files[entry.path().filename().string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

CheckResult check_determinism() {
  std::vector<ExperimentConfig> configs;
  auto add = [&](const std::string& command, auto&& tweak) {
    ExperimentConfig c;
    c.command = command;
    c.seed = 7;
    c.instance.n_states = 4;
    c.instance.n_actions = 2;
    c.instance.branching = 3;
    c.instance.gamma = 0.6;
    c.algorithm.epsilon = 0.5;
    c.algorithm.delta = 0.2;
    tweak(c);
    c.output.prefix = command + "_" + std::to_string(configs.size());
    configs.push_back(std::move(c));
  };
  add("gen", [](ExperimentConfig&) {});
  add("solve-exact", [](ExperimentConfig&) {});
  add("tabular-auto", [](ExperimentConfig& c) { c.algorithm.iterations = 200; });
  add("tabular-auto", [](ExperimentConfig& c) {
    c.algorithm.iterations = 50;
    c.replicates = 3;
  });
  add("ctd-eval", [](ExperimentConfig& c) {
    c.algorithm.ctd_n = 2000;
    c.algorithm.ctd_runs = 2;
  });
  add("spmd-ctd", [](ExperimentConfig& c) {
    c.algorithm.desk = paramfree_desk();
    c.algorithm.underline_kappa = 1.0;
    c.algorithm.iterations = 3;
  });
  add("paramfree", [](ExperimentConfig& c) { c.algorithm.desk = paramfree_desk(); });

  const fs::path root =
      fs::temp_directory_path() / ("autoexplore_determinism_" + std::to_string(::getpid()));
  std::map<std::string, std::string> runs[2];
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = root / std::to_string(pass);
    fs::remove_all(dir);
    for (ExperimentConfig c : configs) {
      c.output.dir = dir.string();
      std::ostringstream out, err;
      const int code = run_command(c, out, err);
      if (code != kExitOk) {
        fs::remove_all(root);
        return result(false, c.command + " exited with " + std::to_string(code) + ": " + err.str());
      }
    }
    runs[pass] = read_tree(dir);
  }
  fs::remove_all(root);
  int differing = 0;
  for (const auto& [name, bytes] : runs[0]) {
    const auto it = runs[1].find(name);
    differing += it == runs[1].end() || it->second != bytes;
  }
  const bool ok = !runs[0].empty() && runs[0].size() == runs[1].size() && differing == 0;
  return result(ok, std::to_string(runs[0].size()) + " output files, " +
                        std::to_string(differing) + " differ between runs");
}

}  // namespace

const std::vector<Check>& battery() {
  static const std::vector<Check> checks{
      {1, "exact oracles agree with unrolling and policy iteration", check_oracles},
      {2, "performance difference identity", check_performance_difference},
      {3, "Tsallis Bregman strong convexity", check_tsallis_bregman},
      {4, "advantage gap sandwich", check_gap_sandwich},
      {5, "projected operator structure", check_operator_structure},
      {6, "CTD converges to the projected fixed point", check_ctd_convergence},
      {7, "TOMC bias within the hitting band", check_tomc_bias},
      {8, "gap estimate concentration", check_gap_concentration},
      {9, "implicit mixing bounds for perturbed policies", check_implicit_mixing},
      {10, "tabular auto-exploration end to end", check_tabular_end_to_end},
      {11, "parameter-free driver certifies", check_paramfree_end_to_end},
      {12, "byte-identical command outputs", check_determinism},
  };
  return checks;
}

std::vector<CheckResult> run_battery(const std::vector<int>& ids) {
  std::vector<CheckResult> out;
  for (const auto& check : battery()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), check.id) == ids.end()) {
      continue;
    }
    CheckResult r;
    try {
      r = check.run();
    } catch (const std::exception& e) {
      r = result(false, std::string("threw: ") + e.what());
    }
    r.id = check.id;
    r.name = check.name;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace autoexplore::cli
