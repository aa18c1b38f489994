#include "autoexplore/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <stdexcept>

namespace autoexplore {

namespace {

constexpr double kTabularConstant = 36.0;

// log2(1/(1-gamma)), floored at 1 so the formulas stay finite for gamma < 1/2.
double horizon_log(double gamma) { return std::max(1.0, std::log2(1.0 / (1.0 - gamma))); }

double q_scale(double gamma, double m_h) {
  const double q_bar = 1.0 / (1.0 - gamma);
  return q_bar * q_bar + m_h * m_h;
}

}  // namespace

double tabular_iteration_count(double gamma, int n_actions, double epsilon, double m_h) {
  const double p = tsallis_index(gamma);
  return kTabularConstant * kTabularConstant * std::pow(n_actions, 1.0 - p) * q_scale(gamma, m_h) /
         ((1.0 - gamma) * (1.0 - gamma) * (1.0 - p) * p * epsilon * epsilon);
}

double tabular_underline_pi(double gamma, int n_actions, int n_states, double k, double delta) {
  const double lh = horizon_log(gamma);
  return (1.0 - gamma) / (n_actions * kTabularConstant * kTabularConstant *
                          std::log2(2.0 * n_states * k / delta) * lh * lh);
}

TabularAutoConfig theorem_params(double gamma, int n_actions, int n_states, double epsilon,
                                 double delta, double m_h) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("theorem_params: gamma must lie in [0, 1)");
  }
  if (n_actions <= 0 || n_states <= 0) {
    throw std::invalid_argument("theorem_params: sizes must be positive");
  }
  TabularAutoConfig c;
  c.gamma = gamma;
  c.n_states = n_states;
  c.n_actions = n_actions;
  c.q_bar = 1.0 / (1.0 - gamma);
  if (!(epsilon > 0.0 && epsilon < c.q_bar)) {
    throw std::invalid_argument("theorem_params: epsilon must lie in (0, 1/(1-gamma))");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("theorem_params: delta must lie in (0, 1)");
  }
  if (!(m_h >= 0.0)) {
    throw std::invalid_argument("theorem_params: M_h must be nonnegative");
  }
  c.epsilon = epsilon;
  c.delta = delta;
  c.m_h = m_h;
  c.p = tsallis_index(gamma);
  c.alpha = std::sqrt(std::pow(n_actions, 1.0 - c.p) / ((1.0 - c.p) * c.p * q_scale(gamma, m_h)));
  c.k = static_cast<std::int64_t>(std::ceil(tabular_iteration_count(gamma, n_actions, epsilon, m_h)));
  c.varsigma = (1.0 - gamma) * epsilon / kTabularConstant;
  c.underline_pi = tabular_underline_pi(gamma, n_actions, n_states, static_cast<double>(c.k), delta);
  return c;
}

double TabularAutoConfig::eta(std::int64_t t) const {
  return alpha / std::sqrt(anytime ? static_cast<double>(t + 1) : static_cast<double>(k));
}

double TabularAutoConfig::varsigma_at(std::int64_t t) const {
  if (!anytime) {
    return varsigma;
  }
  return (1.0 - gamma) / (static_cast<double>(t + 1) * kTabularConstant);
}

double TabularAutoConfig::underline_pi_at(std::int64_t t) const {
  if (!anytime) {
    return underline_pi;
  }
  return tabular_underline_pi(gamma, n_actions, n_states, static_cast<double>(t + 1), delta);
}

TabularRunResult run_tabular_autoexplore(SampleStream& stream, const TabularAutoConfig& config,
                                         const TabularMdp* oracle) {
  const TabularMdp& mdp = stream.mdp();
  if (mdp.n_states() != config.n_states || mdp.n_actions() != config.n_actions ||
      mdp.gamma() != config.gamma) {
    throw std::invalid_argument("run_tabular_autoexplore: config does not match the stream's MDP");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::optional<OptimalSolution> opt;
  if (oracle != nullptr) {
    opt = solve_optimal(*oracle);
  }
  auto gap = [&](const Policy& pi) { return opt ? optimality_gap(*oracle, pi, opt->value) : nan; };
  auto min_optact = [&](const Policy& pi) {
    if (!opt) {
      return nan;
    }
    return pi.probs().cwiseProduct(opt->policy.probs()).rowwise().sum().minCoeff();
  };

  const DistanceGenerator dgf = config.dgf();
  Policy pi = Policy::uniform(mdp.n_states(), mdp.n_actions());
  RunRecord record({"iter", "samples_cum", "m_tilde", "gap_linf", "min_optact_prob"});
  record.summary()["initial_gap_linf"] = gap(pi);

  const std::int64_t start = stream.samples();
  for (std::int64_t t = 0; t < config.k; ++t) {
    const CollectResult est =
        dynamic_mixing_collect(stream, pi, config.varsigma_at(t), config.underline_pi_at(t));
    pi = spmd_update(pi, est.q, Regularizer::none(), config.eta(t), dgf);
    record.add_row({static_cast<double>(t + 1), static_cast<double>(stream.samples() - start),
                    static_cast<double>(est.m_used), gap(pi), min_optact(pi)});
  }
  TabularRunResult out{std::move(pi), std::move(record), stream.samples() - start};
  out.record.summary()["final_gap_linf"] = gap(out.policy);
  out.record.summary()["total_samples"] = out.total_samples;
  out.record.summary()["iterations"] = config.k;
  return out;
}

ExplorationDifficulty d_expl(const MixingProfile& profile_star, int n_actions, int n_pairs,
                             double delta, double gamma) {
  const double rho = profile_star.rate;
  const double nu = profile_star.min_stationary();
  if (!profile_star.is_geometric || !(rho < 1.0)) {
    throw std::invalid_argument("d_expl: profile must be geometric with rho < 1");
  }
  if (!(nu > 0.0)) {
    throw std::invalid_argument("d_expl: stationary floor must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0) || n_pairs < 1 || n_actions < 1) {
    throw std::invalid_argument("d_expl: invalid sizes or delta");
  }
  ExplorationDifficulty d;
  d.block_length = mixing_block_length(nu, rho);
  d.n_actions = n_actions;
  d.n_pairs = n_pairs;
  d.delta = delta;
  d.gamma = gamma;
  d.rate = rho;
  d.nu_floor = nu;
  const double base = n_actions * std::log2(n_pairs / delta) / (1.0 - gamma);
  d.value = std::pow(base, 2.0 * d.block_length) / ((1.0 - rho) * nu * nu * nu);
  return d;
}

}  // namespace autoexplore
