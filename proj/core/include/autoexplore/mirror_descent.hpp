#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>

#include "autoexplore/mdp.hpp"
#include "autoexplore/run_record.hpp"

namespace autoexplore {

/// Distance-generating function on the simplex: KL or negative Tsallis entropy.
struct DistanceGenerator {
  enum class Kind { kKl, kTsallis };

  Kind kind = Kind::kKl;
  double p = 0.5;  ///< Tsallis entropic index, strictly inside (0, 1)

  static DistanceGenerator kl() { return {}; }
  static DistanceGenerator tsallis(double p);
  /// Tsallis with p = min(1/2, 1/log2(1/(1 - gamma))).
  static DistanceGenerator for_discount(double gamma);

  double omega(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& u) const;
};

/// min(1/2, 1/log2(1/(1 - gamma))); 1/2 whenever gamma < 3/4.
double tsallis_index(double gamma);

/// D(u, v) = omega(v) - omega(u) - <grad omega(u), v - u>, both arguments clipped at 1e-12.
double bregman(const DistanceGenerator& dgf, const Eigen::Ref<const Eigen::VectorXd>& u,
               const Eigen::Ref<const Eigen::VectorXd>& v);

/// argmin over the simplex of <q, x> + h(x) + D(pi_s, x) / eta.
Eigen::VectorXd spmd_step(const Eigen::Ref<const Eigen::VectorXd>& pi_s,
                          const Eigen::Ref<const Eigen::VectorXd>& q_row, const Regularizer& h,
                          double eta, const DistanceGenerator& dgf, double tol = 1e-12);

/// spmd_step applied independently at every state.
Policy spmd_update(const Policy& pi, const QFunction& q, const Regularizer& h, double eta,
                   const DistanceGenerator& dgf, double tol = 1e-12);

struct SpmdConfig {
  double alpha = 1.0;
  std::int64_t k = 4;
  bool anytime = false;  ///< eta_t = alpha / sqrt(t + 1) instead of alpha / sqrt(k)
  DistanceGenerator dgf = DistanceGenerator::kl();
  double tolerance = 1e-12;

  double eta(std::int64_t t) const;
  void validate() const;
};

using QEstimator = std::function<QFunction(const Policy& pi, std::int64_t iteration)>;

struct SpmdRunResult {
  Policy policy;
  RunRecord record;  ///< columns iter, gap_linf (NaN without an oracle)
};

/// k SPMD iterations from pi0. With an oracle MDP and h = none, row t holds
/// the sup-norm optimality gap of pi_t for t = 0..k.
SpmdRunResult spmd_run(const Policy& pi0, const QEstimator& estimator, const SpmdConfig& config,
                       const Regularizer& h = Regularizer::none(),
                       const TabularMdp* oracle = nullptr);

}  // namespace autoexplore
