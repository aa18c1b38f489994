#pragma once

#include <cstdint>
#include <functional>

#include "autoexplore/linear_fa.hpp"
#include "autoexplore/mirror_descent.hpp"
#include "autoexplore/run_record.hpp"
#include "autoexplore/sampler.hpp"

namespace autoexplore {

/**
 * Divisors applied to the theoretical k, T, N, m and certificate M. All ones
 * reproduces the formulas (only useful for checking the arithmetic: the
 * constants make every count astronomically large).
 */
struct DeskScale {
  double k_div = 1.0;
  double t_div = 1.0;
  double n_div = 1.0;
  double m_div = 1.0;
  double cert_div = 1.0;

  bool is_theoretical() const {
    return k_div == 1.0 && t_div == 1.0 && n_div == 1.0 && m_div == 1.0 && cert_div == 1.0;
  }
};

struct SpmdCtdConfig {
  double gamma = 0.0;
  int n_states = 0;
  int n_actions = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double f = 0.0;
  double underline_kappa = 0.0;
  double omega = 1.0;
  double sigma_min = 1.0;

  double p = 0.5;
  double alpha = 0.0;
  double eta = 0.0;
  double w_floor = 0.0;
  double mu_floor = 0.0;
  double iota = 0.0;
  double eps_state = 0.0;
  double eps_action = 0.0;

  // Formula values, kept as doubles because they overflow any integer type
  // for realistic inputs.
  double k_theory = 0.0;
  double T_theory = 0.0;
  double N_theory = 0.0;
  double m_theory = 0.0;

  std::int64_t k = 0;
  std::int64_t T = 0;
  std::int64_t N = 0;
  std::int64_t m = 0;
  int replicates = 1;  ///< ceil(log2(4k / delta))
  DeskScale desk;

  CtdConfig ctd(int s_or) const;
};

SpmdCtdConfig synth_params(double gamma, const FeatureMap& fmap, int n_actions, int n_states,
                           double epsilon, double delta, double underline_kappa,
                           const DeskScale& desk = {});

/// ceil of a positive double clamped into int64, at least `floor_value`.
std::int64_t clamp_count(double value, std::int64_t floor_value = 1);

/// Chooses the origin state for iteration t given the stream's current state.
using OriginSelector = std::function<int(std::int64_t t, int current_state)>;

struct SpmdCtdResult {
  Policy policy;
  RunRecord record;  ///< iter, samples_cum, q_est_error, gap_linf, kappa_floor_used
  std::int64_t total_samples = 0;
};

SpmdCtdResult spmd_ctd_run(SampleStream& stream, const FeatureMap& fmap, const SpmdCtdConfig& config,
                           const OriginSelector& select_origin = nullptr,
                           const TabularMdp* oracle = nullptr);

}  // namespace autoexplore
