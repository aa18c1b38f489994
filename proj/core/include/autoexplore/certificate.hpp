#pragma once

#include <cstdint>
#include <vector>

#include "autoexplore/mdp.hpp"
#include "autoexplore/sampler.hpp"

namespace autoexplore {

/// g(s) = max_p -psi(s, p). For h = none this is V(s) - min_a Q(s, a).
Eigen::VectorXd exact_gap(const TabularMdp& mdp, const Policy& pi,
                          const Regularizer& h = Regularizer::none());

struct GapEstimate {
  Eigen::VectorXd g_hat;
  int replicates = 0;
  double varsigma = 0.0;
  double max = 0.0;
  std::int64_t samples = 0;
  std::int64_t phase2_samples = 0;
  int rare_pairs = 0;
};

/// Average the centered estimates Q(s,a) - <Q(s,.), pi(.|s)> and take max_a of the negation.
GapEstimate gap_from_q_estimates(const std::vector<QFunction>& estimates, const Policy& pi);

/// M independent two-phase estimates on the same stream.
GapEstimate estimate_gap(SampleStream& stream, const Policy& pi, double varsigma, int replicates,
                         double underline_pi, double eps_state);

/// 4 eps (log2(8 |Z| k / delta))^2.
double certificate_threshold(double epsilon, double k, int n_pairs, double delta);
bool certificate_passes(const GapEstimate& gap, double epsilon, double k, int n_pairs, double delta);

/// ceil(8 / ((1 - gamma)^2 eps^2) / divisor), at least 1.
int certificate_replicates(double gamma, double epsilon, double divisor = 1.0);

}  // namespace autoexplore
