#pragma once

#include <cstdint>

#include "autoexplore/mdp.hpp"
#include "autoexplore/mirror_descent.hpp"
#include "autoexplore/run_record.hpp"
#include "autoexplore/sampler.hpp"

namespace autoexplore {

struct TabularAutoConfig {
  double gamma = 0.0;
  int n_states = 0;
  int n_actions = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double m_h = 0.0;
  double q_bar = 0.0;  ///< 1 / (1 - gamma)

  double p = 0.5;
  double alpha = 0.0;
  std::int64_t k = 0;
  double varsigma = 0.0;
  double underline_pi = 0.0;
  bool anytime = false;

  DistanceGenerator dgf() const { return DistanceGenerator::tsallis(p); }
  double eta(std::int64_t t) const;
  /// Per-iteration (varsigma, underline_pi); anytime mode substitutes k -> t+1, eps -> 1/(t+1).
  double varsigma_at(std::int64_t t) const;
  double underline_pi_at(std::int64_t t) const;
};

TabularAutoConfig theorem_params(double gamma, int n_actions, int n_states, double epsilon,
                                 double delta, double m_h = 0.0);

/// Closed-form ingredients of the parameter formulas, exposed for tests.
double tabular_iteration_count(double gamma, int n_actions, double epsilon, double m_h);
double tabular_underline_pi(double gamma, int n_actions, int n_states, double k, double delta);

struct TabularRunResult {
  Policy policy;
  RunRecord record;  ///< iter, samples_cum, m_tilde, gap_linf, min_optact_prob
  std::int64_t total_samples = 0;
};

/// k rounds of {dynamic_mixing_collect, spmd_update} on one stream. With an
/// oracle the gap and optimal-action columns are filled, otherwise NaN.
TabularRunResult run_tabular_autoexplore(SampleStream& stream, const TabularAutoConfig& config,
                                         const TabularMdp* oracle = nullptr);

struct ExplorationDifficulty {
  double value = 0.0;
  int block_length = 0;
  int n_actions = 0;
  int n_pairs = 0;
  double delta = 0.0;
  double gamma = 0.0;
  double rate = 0.0;
  double nu_floor = 0.0;
};

/// (|A| log2(|Z|/delta) / (1 - gamma))^(2 b) / ((1 - rho) nu^3).
ExplorationDifficulty d_expl(const MixingProfile& profile_star, int n_actions, int n_pairs,
                             double delta, double gamma);

}  // namespace autoexplore
