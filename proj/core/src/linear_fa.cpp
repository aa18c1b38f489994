#include "autoexplore/linear_fa.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "autoexplore/errors.hpp"

namespace autoexplore {

FeatureMap::FeatureMap(Eigen::MatrixXd phi) : phi_(std::move(phi)) {
  if (phi_.rows() == 0 || phi_.cols() == 0) {
    throw std::invalid_argument("FeatureMap: empty feature table");
  }
  if (phi_.cols() > phi_.rows()) {
    throw std::invalid_argument("FeatureMap: d must not exceed the number of pairs");
  }
  if (!phi_.allFinite()) {
    throw std::invalid_argument("FeatureMap: non-finite entries");
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi_);
  const auto& sv = svd.singularValues();
  omega_ = sv[0];
  sigma_min_ = sv[sv.size() - 1];
  if (!(sigma_min_ > 1e-10)) {
    throw std::invalid_argument("FeatureMap: features are not full column rank");
  }
}

FeatureMap FeatureMap::identity(int n_pairs) {
  return FeatureMap(Eigen::MatrixXd::Identity(n_pairs, n_pairs));
}

FeatureMap FeatureMap::one_hot_state(int n_states, int n_actions) {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n_states * n_actions, n_states);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      phi(s * n_actions + a, s) = 1.0;
    }
  }
  return FeatureMap(std::move(phi));
}

FeatureMap FeatureMap::random_gaussian(int n_pairs, int d, std::uint64_t seed) {
  if (n_pairs <= 0 || d <= 0) {
    throw std::invalid_argument("FeatureMap::random_gaussian: sizes must be positive");
  }
  CounterRng rng(seed, 0x5eed);
  Eigen::MatrixXd phi(n_pairs, d);
  for (int z = 0; z < n_pairs; ++z) {
    for (int j = 0; j < d; ++j) {
      phi(z, j) = rng.normal();
    }
  }
  return FeatureMap(std::move(phi));
}

nlohmann::json FeatureMap::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index z = 0; z < phi_.rows(); ++z) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < phi_.cols(); ++j) {
      row.push_back(phi_(z, j));
    }
    rows.push_back(std::move(row));
  }
  return {{"d", dim()}, {"rows", std::move(rows)}};
}

FeatureMap FeatureMap::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("d") || !doc.contains("rows")) {
    throw std::invalid_argument("feature json: expected {d, rows}");
  }
  const int d = doc.at("d").get<int>();
  const auto& rows = doc.at("rows");
  if (!rows.is_array() || rows.empty()) {
    throw std::invalid_argument("feature json: rows must be a nonempty array");
  }
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t z = 0; z < rows.size(); ++z) {
    if (!rows[z].is_array() || static_cast<int>(rows[z].size()) != d) {
      throw std::invalid_argument("feature json: rows[" + std::to_string(z) + "] must have length d");
    }
    for (int j = 0; j < d; ++j) {
      phi(static_cast<Eigen::Index>(z), j) = rows[z][static_cast<std::size_t>(j)].get<double>();
    }
  }
  return FeatureMap(std::move(phi));
}

WeightModel build_weights(const TabularMdp& mdp, const Policy& pi, const FeatureMap& fmap, int s_or,
                          double f, double eps_action) {
  if (fmap.n_pairs() != mdp.n_pairs()) {
    throw std::invalid_argument("build_weights: feature rows must match the number of pairs");
  }
  const StateDistribution kappa = mixed_visitation(mdp, pi, s_or, f);
  const Policy explore = perturb_action_policy(pi, eps_action);
  WeightModel wm;
  wm.s_or = s_or;
  wm.f = f;
  wm.eps_action = eps_action;
  wm.w.resize(mdp.n_pairs());
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      wm.w[mdp.pair_index(s, a)] = kappa[s] * explore(s, a);
    }
  }
  const Eigen::MatrixXd gram = fmap.phi().transpose() * wm.w.asDiagonal() * fmap.phi();
  wm.mu = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
              .eigenvalues()
              .minCoeff();
  if (!(wm.mu > 1e-14)) {
    throw std::invalid_argument("build_weights: lambda_min(Phi^T W Phi) is not positive");
  }
  return wm;
}

double weighted_norm(const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& w) {
  return std::sqrt((w.array() * x.array().square()).sum());
}

Eigen::MatrixXd pair_kernel(const TabularMdp& mdp, const Policy& pi) {
  const int n = mdp.n_pairs();
  Eigen::MatrixXd kernel(n, n);
  for (int z = 0; z < n; ++z) {
    for (int s2 = 0; s2 < mdp.n_states(); ++s2) {
      const double p = mdp.transition()(z, s2);
      for (int a2 = 0; a2 < mdp.n_actions(); ++a2) {
        kernel(z, mdp.pair_index(s2, a2)) = p * pi(s2, a2);
      }
    }
  }
  return kernel;
}

Eigen::VectorXd flatten_q(const QFunction& q) {
  Eigen::VectorXd out(q.size());
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    for (Eigen::Index a = 0; a < q.cols(); ++a) {
      out[s * q.cols() + a] = q(s, a);
    }
  }
  return out;
}

QFunction unflatten_q(const Eigen::Ref<const Eigen::VectorXd>& q, int n_states, int n_actions) {
  if (q.size() != static_cast<Eigen::Index>(n_states) * n_actions) {
    throw std::invalid_argument("unflatten_q: size mismatch");
  }
  QFunction out(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      out(s, a) = q[s * n_actions + a];
    }
  }
  return out;
}

Eigen::VectorXd pair_cost(const TabularMdp& mdp) { return flatten_q(mdp.cost()); }

Eigen::VectorXd exact_F(const TabularMdp& mdp, const Policy& pi, const FeatureMap& fmap,
                        const WeightModel& wm, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  const Eigen::VectorXd q = fmap.phi() * theta;
  const Eigen::VectorXd residual = q - pair_cost(mdp) - mdp.gamma() * (pair_kernel(mdp, pi) * q);
  return fmap.phi().transpose() * (wm.w.asDiagonal() * residual);
}

ProjectedBellmanSolution solve_projected_bellman(const TabularMdp& mdp, const Policy& pi,
                                                 const FeatureMap& fmap, const WeightModel& wm) {
  const Eigen::MatrixXd& phi = fmap.phi();
  const int n = mdp.n_pairs();
  const Eigen::MatrixXd weighted = phi.transpose() * wm.w.asDiagonal();
  const Eigen::MatrixXd system =
      weighted * (Eigen::MatrixXd::Identity(n, n) - mdp.gamma() * pair_kernel(mdp, pi)) * phi;
  const Eigen::VectorXd rhs = weighted * pair_cost(mdp);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) {
    throw SingularSystem("solve_projected_bellman: system is singular");
  }
  ProjectedBellmanSolution out;
  out.theta = lu.solve(rhs);
  const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  if (!out.theta.allFinite() || (system * out.theta - rhs).lpNorm<Eigen::Infinity>() > 1e-10 * scale) {
    throw SingularSystem("solve_projected_bellman: residual check failed");
  }
  out.q = phi * out.theta;
  return out;
}

double CtdConfig::iota_cap(double gamma, double omega) {
  return (1.0 - gamma) / (512.0 * omega * omega);
}

std::int64_t CtdConfig::mixing_floor(double gamma, double omega, int n_states, double mu) {
  const double target = (omega * omega + 1.0) * std::sqrt(static_cast<double>(n_states)) / mu;
  if (gamma == 0.0 || target <= 1.0) {
    return 1;
  }
  const double value = std::log(target) / std::log(1.0 / gamma);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(value - 1e-12)));
}

void CtdConfig::validate(const TabularMdp& mdp) const {
  if (N < 0 || m < 0 || !(iota >= 0.0)) {
    throw std::invalid_argument("CtdConfig: N, m and iota must be nonnegative");
  }
  if (s_or < 0 || s_or >= mdp.n_states()) {
    throw std::invalid_argument("CtdConfig: origin state out of range");
  }
  if (!(f >= 0.0 && f <= 1.0) || !(eps_state >= 0.0 && eps_state <= 1.0) ||
      !(eps_action >= 0.0 && eps_action <= 1.0)) {
    throw std::invalid_argument("CtdConfig: f and exploration rates must lie in [0, 1]");
  }
}

OperatorSampler::OperatorSampler(const Policy& pi, const CtdConfig& config)
    : pi_(&pi),
      explore_state_(perturb_state_policy(pi, config.eps_state)),
      explore_action_(perturb_action_policy(pi, config.eps_action)),
      config_(config) {}

OperatorDraw OperatorSampler::draw(SampleStream& stream, const FeatureMap& fmap,
                                   const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  const TabularMdp& mdp = stream.mdp();
  CounterRng& aux = stream.aux_rng();
  int origin = config_.s_or;
  if (config_.f > 0.0 && aux.uniform() < config_.f) {
    origin = aux.uniform_int(mdp.n_states());
  }
  const std::int64_t horizon = mdp.gamma() > 0.0 ? aux.geometric(1.0 - mdp.gamma()) : 0;

  OperatorDraw out;
  if (horizon >= config_.m) {
    return out;
  }
  const std::int64_t start = stream.samples();
  while (stream.state() != origin) {
    stream.step(explore_state_);
  }
  for (std::int64_t t = 0; t < horizon; ++t) {
    stream.step(*pi_);
  }
  const Transition tr = stream.step(explore_action_);
  const int a_next = stream.draw_action(*pi_, tr.next_state);
  out.zero = false;
  out.z = mdp.pair_index(tr.state, tr.action);
  out.z_next = mdp.pair_index(tr.next_state, a_next);
  out.cost = tr.cost;
  out.residual = fmap.row(out.z).dot(theta) - tr.cost - mdp.gamma() * fmap.row(out.z_next).dot(theta);
  out.samples = stream.samples() - start;
  return out;
}

FHatSample sample_F_hat(SampleStream& stream, const Policy& pi,
                        const Eigen::Ref<const Eigen::VectorXd>& theta, const FeatureMap& fmap,
                        const CtdConfig& config) {
  config.validate(stream.mdp());
  const OperatorDraw d = OperatorSampler(pi, config).draw(stream, fmap, theta);
  FHatSample out;
  out.samples = d.samples;
  if (d.zero) {
    out.value = Eigen::VectorXd::Zero(fmap.dim());
  } else {
    out.value = fmap.row(d.z).transpose() * d.residual;
  }
  return out;
}

CtdResult ctd_run(SampleStream& stream, const Policy& pi, const FeatureMap& fmap,
                  const CtdConfig& config) {
  config.validate(stream.mdp());
  if (fmap.n_pairs() != stream.mdp().n_pairs()) {
    throw std::invalid_argument("ctd_run: feature rows must match the number of pairs");
  }
  const OperatorSampler sampler(pi, config);
  const std::int64_t start = stream.samples();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(fmap.dim());
  Eigen::VectorXd total = Eigen::VectorXd::Zero(fmap.dim());
  for (std::int64_t t = 0; t < 2 * config.N; ++t) {
    if (t >= config.N) {
      total += theta;
    }
    const OperatorDraw d = sampler.draw(stream, fmap, theta);
    if (!d.zero) {
      theta.noalias() -= (config.iota * d.residual) * fmap.row(d.z).transpose();
    }
  }
  CtdResult out;
  out.theta_avg = config.N > 0 ? Eigen::VectorXd(total / static_cast<double>(config.N))
                               : Eigen::VectorXd::Zero(fmap.dim());
  out.q_hat = fmap.phi() * out.theta_avg;
  out.samples = stream.samples() - start;
  return out;
}

std::size_t robust_min_norm(const std::vector<Eigen::VectorXd>& candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("robust_min_norm: no candidates");
  }
  std::size_t best = 0;
  double best_norm = candidates[0].lpNorm<Eigen::Infinity>();
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double norm = candidates[i].lpNorm<Eigen::Infinity>();
    if (norm < best_norm) {
      best = i;
      best_norm = norm;
    }
  }
  return best;
}

}  // namespace autoexplore
