#include "autoexplore/spmd_ctd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace autoexplore {

namespace {

constexpr double kIterationConstant = 343.0;

double horizon_log(double gamma) { return std::max(1.0, std::log2(1.0 / (1.0 - gamma))); }

}  // namespace

std::int64_t clamp_count(double value, std::int64_t floor_value) {
  constexpr double kMax = 9.0e18;
  if (!(value < kMax)) {
    return std::numeric_limits<std::int64_t>::max();
  }
  return std::max(floor_value, static_cast<std::int64_t>(std::ceil(value)));
}

SpmdCtdConfig synth_params(double gamma, const FeatureMap& fmap, int n_actions, int n_states,
                           double epsilon, double delta, double underline_kappa,
                           const DeskScale& desk) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("synth_params: gamma must lie in [0, 1)");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0 / (1.0 - gamma))) {
    throw std::invalid_argument("synth_params: epsilon must lie in (0, 1/(1-gamma))");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("synth_params: delta must lie in (0, 1)");
  }
  if (!(underline_kappa > 0.0 && underline_kappa <= 1.0)) {
    throw std::invalid_argument("synth_params: underline_kappa must lie in (0, 1]");
  }
  if (n_actions <= 0 || n_states <= 0 || fmap.n_pairs() != n_states * n_actions) {
    throw std::invalid_argument("synth_params: sizes do not match the feature map");
  }
  if (!(desk.k_div >= 1.0 && desk.t_div >= 1.0 && desk.n_div >= 1.0 && desk.m_div >= 1.0 &&
        desk.cert_div >= 1.0)) {
    throw std::invalid_argument("synth_params: desk divisors must be at least 1");
  }

  SpmdCtdConfig c;
  c.gamma = gamma;
  c.n_states = n_states;
  c.n_actions = n_actions;
  c.epsilon = epsilon;
  c.delta = delta;
  c.underline_kappa = underline_kappa;
  c.omega = fmap.omega();
  c.sigma_min = fmap.sigma_min();
  c.desk = desk;

  const double g1 = 1.0 - gamma;
  const double om2 = c.omega * c.omega;
  const double eps2 = epsilon * epsilon;

  c.w_floor = g1 * underline_kappa * underline_kappa / (4.0 * n_actions);
  c.mu_floor = c.sigma_min * c.sigma_min * c.w_floor;
  c.iota = CtdConfig::iota_cap(gamma, c.omega);
  c.T_theory = std::ceil(4096.0 * om2 / (g1 * g1 * c.mu_floor));
  c.N_theory = std::ceil(5061.0 * c.T_theory / c.w_floor *
                         std::log2(2.0 * c.T_theory * om2 / (std::pow(g1, 4) * c.mu_floor * eps2)));
  const double m_arg = 3.0 * 786.0 * 144.0 * 144.0 * std::sqrt(static_cast<double>(n_states)) * om2 *
                       (om2 + 1.0) * c.T_theory * c.T_theory /
                       (128.0 * std::pow(g1, 3) * c.mu_floor * c.mu_floor * c.w_floor * c.w_floor * eps2);
  c.m_theory = gamma > 0.0 ? std::ceil(std::log(m_arg) / std::log(1.0 / gamma)) : 1.0;

  c.p = tsallis_index(gamma);
  const double a_pow = std::pow(n_actions, 1.0 - c.p);
  c.alpha = std::sqrt(a_pow / (g1 * g1 * (1.0 - c.p) * c.p));
  c.k_theory = std::ceil(kIterationConstant * kIterationConstant * a_pow /
                         (std::pow(g1, 4) * (1.0 - c.p) * c.p * eps2));
  const double lh = horizon_log(gamma);
  c.eps_state = g1 / (kIterationConstant * kIterationConstant *
                      std::log2(2.0 * c.k_theory * n_states / delta) * lh * lh);
  c.eps_action = g1 * underline_kappa / 4.0;

  c.k = clamp_count(c.k_theory / desk.k_div);
  c.T = clamp_count(c.T_theory / desk.t_div);
  const std::int64_t ratio = clamp_count(c.N_theory / c.T_theory / desk.n_div);
  c.N = ratio > std::numeric_limits<std::int64_t>::max() / c.T ? std::numeric_limits<std::int64_t>::max()
                                                                 : c.T * ratio;
  c.m = std::max(CtdConfig::mixing_floor(gamma, c.omega, n_states, c.mu_floor),
                 clamp_count(c.m_theory / desk.m_div));
  c.eta = c.alpha / std::sqrt(static_cast<double>(c.k));
  c.replicates = static_cast<int>(
      std::max<std::int64_t>(1, clamp_count(std::log2(4.0 * static_cast<double>(c.k) / delta))));
  return c;
}

CtdConfig SpmdCtdConfig::ctd(int s_or) const {
  CtdConfig c;
  c.N = N;
  c.iota = iota;
  c.m = m;
  c.s_or = s_or;
  c.f = f;
  c.eps_state = eps_state;
  c.eps_action = eps_action;
  return c;
}

SpmdCtdResult spmd_ctd_run(SampleStream& stream, const FeatureMap& fmap, const SpmdCtdConfig& config,
                           const OriginSelector& select_origin, const TabularMdp* oracle) {
  const TabularMdp& mdp = stream.mdp();
  if (mdp.n_states() != config.n_states || mdp.n_actions() != config.n_actions ||
      fmap.n_pairs() != mdp.n_pairs()) {
    throw std::invalid_argument("spmd_ctd_run: config does not match the stream's MDP");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::optional<ValueFunction> v_star;
  if (oracle != nullptr) {
    v_star = solve_optimal(*oracle).value;
  }
  auto gap = [&](const Policy& pi) { return v_star ? optimality_gap(*oracle, pi, *v_star) : nan; };

  const DistanceGenerator dgf = DistanceGenerator::tsallis(config.p);
  Policy pi = Policy::uniform(mdp.n_states(), mdp.n_actions());
  RunRecord record({"iter", "samples_cum", "q_est_error", "gap_linf", "kappa_floor_used"});
  record.summary()["initial_gap_linf"] = gap(pi);

  const std::int64_t start = stream.samples();
  std::vector<Eigen::VectorXd> candidates;
  for (std::int64_t t = 0; t < config.k; ++t) {
    const int s_or = select_origin ? select_origin(t, stream.state()) : stream.state();
    const CtdConfig ctd = config.ctd(s_or);
    candidates.clear();
    for (int j = 0; j < config.replicates; ++j) {
      candidates.push_back(ctd_run(stream, pi, fmap, ctd).q_hat);
    }
    const Eigen::VectorXd& chosen = candidates[robust_min_norm(candidates)];
    const QFunction q = unflatten_q(chosen, mdp.n_states(), mdp.n_actions());
    const double q_error =
        oracle != nullptr ? (q - exact_q(*oracle, pi)).lpNorm<Eigen::Infinity>() : nan;
    pi = spmd_update(pi, q, Regularizer::none(), config.eta, dgf);
    record.add_row({static_cast<double>(t + 1), static_cast<double>(stream.samples() - start),
                    q_error, gap(pi), config.underline_kappa});
  }
  SpmdCtdResult out{std::move(pi), std::move(record), stream.samples() - start};
  out.record.summary()["final_gap_linf"] = gap(out.policy);
  out.record.summary()["total_samples"] = out.total_samples;
  out.record.summary()["iterations"] = config.k;
  return out;
}

}  // namespace autoexplore
