#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <vector>

#include "autoexplore/mdp.hpp"
#include "autoexplore/sampler.hpp"

namespace autoexplore {

/// |Z| x d feature table with full column rank.
class FeatureMap {
 public:
  explicit FeatureMap(Eigen::MatrixXd phi);

  static FeatureMap identity(int n_pairs);
  /// phi(s, a) = e_s.
  static FeatureMap one_hot_state(int n_states, int n_actions);
  /// i.i.d. N(0, 1) entries from a fixed seed.
  static FeatureMap random_gaussian(int n_pairs, int d, std::uint64_t seed);

  const Eigen::MatrixXd& phi() const noexcept { return phi_; }
  Eigen::MatrixXd::ConstRowXpr row(int z) const { return phi_.row(z); }
  int dim() const noexcept { return static_cast<int>(phi_.cols()); }
  int n_pairs() const noexcept { return static_cast<int>(phi_.rows()); }
  /// Spectral norm.
  double omega() const noexcept { return omega_; }
  double sigma_min() const noexcept { return sigma_min_; }

  nlohmann::json to_json() const;
  static FeatureMap from_json(const nlohmann::json& doc);

 private:
  Eigen::MatrixXd phi_;
  double omega_ = 0.0;
  double sigma_min_ = 0.0;
};

struct WeightModel {
  Eigen::VectorXd w;  ///< pair-indexed distribution
  int s_or = 0;
  double f = 0.0;
  double eps_action = 0.0;
  double mu = 0.0;  ///< lambda_min(Phi^T W Phi)

  double min_weight() const { return w.minCoeff(); }
};

/// w(s, a) = mixed_visitation(s) * perturbed-action policy(a | s).
WeightModel build_weights(const TabularMdp& mdp, const Policy& pi, const FeatureMap& fmap, int s_or,
                          double f, double eps_action);

/// sqrt(sum_z w(z) x(z)^2).
double weighted_norm(const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& w);

/// P((s,a), (s',a')) = P(s'|s,a) pi(a'|s').
Eigen::MatrixXd pair_kernel(const TabularMdp& mdp, const Policy& pi);
/// Pair-indexed cost vector.
Eigen::VectorXd pair_cost(const TabularMdp& mdp);
/// Pair-indexed Q table flattened as z = s * |A| + a.
Eigen::VectorXd flatten_q(const QFunction& q);
QFunction unflatten_q(const Eigen::Ref<const Eigen::VectorXd>& q, int n_states, int n_actions);

/// Phi^T W (Phi theta - c - gamma P_pi Phi theta).
Eigen::VectorXd exact_F(const TabularMdp& mdp, const Policy& pi, const FeatureMap& fmap,
                        const WeightModel& wm, const Eigen::Ref<const Eigen::VectorXd>& theta);

struct ProjectedBellmanSolution {
  Eigen::VectorXd theta;
  Eigen::VectorXd q;  ///< Phi theta, pair-indexed
};

/// Direct solve of Phi^T W (I - gamma P_pi) Phi theta = Phi^T W c. Throws SingularSystem.
ProjectedBellmanSolution solve_projected_bellman(const TabularMdp& mdp, const Policy& pi,
                                                 const FeatureMap& fmap, const WeightModel& wm);

struct CtdConfig {
  std::int64_t N = 0;
  double iota = 0.0;
  std::int64_t m = 1;
  int s_or = 0;
  double f = 0.0;
  double eps_state = 0.0;
  double eps_action = 0.0;

  /// (1 - gamma) / (512 Omega^2).
  static double iota_cap(double gamma, double omega);
  /// ceil(log_{1/gamma}((Omega^2 + 1) sqrt(|S|) / mu)), at least 1.
  static std::int64_t mixing_floor(double gamma, double omega, int n_states, double mu);
  void validate(const TabularMdp& mdp) const;
};

/// One draw of the stochastic operator, stored sparsely: phi(z) * residual.
struct OperatorDraw {
  bool zero = true;
  int z = -1;
  int z_next = -1;
  double cost = 0.0;
  double residual = 0.0;
  std::int64_t samples = 0;
};

/**
 * Three-step sampler: reach a random origin state under the state-exploration
 * policy, run pi for a geometric number of steps, then take one action-exploration
 * step and draw the next action from pi. The origin and horizon come from the
 * stream's auxiliary generator.
 */
class OperatorSampler {
 public:
  OperatorSampler(const Policy& pi, const CtdConfig& config);

  OperatorDraw draw(SampleStream& stream, const FeatureMap& fmap,
                    const Eigen::Ref<const Eigen::VectorXd>& theta) const;

 private:
  const Policy* pi_;
  Policy explore_state_;
  Policy explore_action_;
  CtdConfig config_;
};

struct FHatSample {
  Eigen::VectorXd value;
  std::int64_t samples = 0;
};

FHatSample sample_F_hat(SampleStream& stream, const Policy& pi,
                        const Eigen::Ref<const Eigen::VectorXd>& theta, const FeatureMap& fmap,
                        const CtdConfig& config);

struct CtdResult {
  Eigen::VectorXd q_hat;      ///< Phi * mean(theta_N .. theta_{2N-1})
  Eigen::VectorXd theta_avg;
  std::int64_t samples = 0;
};

/// theta_0 = 0, theta_{t+1} = theta_t - iota F_hat(theta_t) for t < 2N.
CtdResult ctd_run(SampleStream& stream, const Policy& pi, const FeatureMap& fmap,
                  const CtdConfig& config);

/// Index of the smallest sup-norm candidate; ties go to the lowest index.
std::size_t robust_min_norm(const std::vector<Eigen::VectorXd>& candidates);

}  // namespace autoexplore
