#include "autoexplore/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace autoexplore {

Eigen::VectorXd exact_gap(const TabularMdp& mdp, const Policy& pi, const Regularizer& h) {
  const ValueFunction v = exact_value(mdp, pi, h);
  const QFunction q = q_from_value(mdp, pi, h, v);
  if (h.is_none()) {
    return v - q.rowwise().minCoeff();
  }
  // min_p <Q, p> + tau sum p log p = -tau log sum exp(-Q / tau).
  const Eigen::VectorXd hv = regularizer_values(pi, h);
  Eigen::VectorXd g(mdp.n_states());
  for (int s = 0; s < mdp.n_states(); ++s) {
    const Eigen::ArrayXd scaled = -q.row(s).transpose().array() / h.temperature;
    const double top = scaled.maxCoeff();
    const double lse = top + std::log((scaled - top).exp().sum());
    g[s] = v[s] - hv[s] + h.temperature * lse;
  }
  return g;
}

GapEstimate gap_from_q_estimates(const std::vector<QFunction>& estimates, const Policy& pi) {
  if (estimates.empty()) {
    throw std::invalid_argument("gap_from_q_estimates: need at least one estimate");
  }
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(pi.n_states(), pi.n_actions());
  for (const auto& q : estimates) {
    const Eigen::VectorXd v = q.cwiseProduct(pi.probs()).rowwise().sum();
    psi += q.colwise() - v;
  }
  psi /= static_cast<double>(estimates.size());
  GapEstimate out;
  out.g_hat = (-psi).rowwise().maxCoeff();
  out.replicates = static_cast<int>(estimates.size());
  out.max = out.g_hat.maxCoeff();
  return out;
}

GapEstimate estimate_gap(SampleStream& stream, const Policy& pi, double varsigma, int replicates,
                         double underline_pi, double eps_state) {
  if (replicates < 1) {
    throw std::invalid_argument("estimate_gap: need at least one replicate");
  }
  std::vector<QFunction> estimates;
  estimates.reserve(static_cast<std::size_t>(replicates));
  const std::int64_t start = stream.samples();
  std::int64_t phase2 = 0;
  int rare = 0;
  for (int i = 0; i < replicates; ++i) {
    TwoPhaseResult r = two_phase_estimate(stream, pi, varsigma, underline_pi, eps_state);
    phase2 += r.phase2_samples;
    rare += r.rare_pairs;
    estimates.push_back(std::move(r.q));
  }
  GapEstimate out = gap_from_q_estimates(estimates, pi);
  out.varsigma = varsigma;
  out.samples = stream.samples() - start;
  out.phase2_samples = phase2;
  out.rare_pairs = rare;
  return out;
}

double certificate_threshold(double epsilon, double k, int n_pairs, double delta) {
  const double l = std::log2(8.0 * n_pairs * k / delta);
  return 4.0 * epsilon * l * l;
}

bool certificate_passes(const GapEstimate& gap, double epsilon, double k, int n_pairs, double delta) {
  return gap.max <= certificate_threshold(epsilon, k, n_pairs, delta);
}

int certificate_replicates(double gamma, double epsilon, double divisor) {
  const double full = std::ceil(8.0 / ((1.0 - gamma) * (1.0 - gamma) * epsilon * epsilon));
  return static_cast<int>(std::max(1.0, std::ceil(full / divisor)));
}

}  // namespace autoexplore
