#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace autoexplore {

/// V(s), one entry per state.
using ValueFunction = Eigen::VectorXd;
/// Q(s, a) stored as an n_states x n_actions table.
using QFunction = Eigen::MatrixXd;
/// Distribution over states.
using StateDistribution = Eigen::VectorXd;

inline constexpr double kSimplexTolerance = 1e-12;

/**
 * Finite discounted MDP (S, A, P, c, gamma) with costs normalized to [0, 1].
 *
 * Transition probabilities are stored as an (|S|*|A|) x |S| matrix whose row
 * `s * |A| + a` is P(. | s, a). This is also the state-action pair index used
 * everywhere else in the library.
 */
class TabularMdp {
 public:
  TabularMdp(int n_states, int n_actions, Eigen::MatrixXd transition, Eigen::MatrixXd cost,
             double gamma);

  int n_states() const noexcept { return n_states_; }
  int n_actions() const noexcept { return n_actions_; }
  int n_pairs() const noexcept { return n_states_ * n_actions_; }
  double gamma() const noexcept { return gamma_; }

  int pair_index(int s, int a) const noexcept { return s * n_actions_ + a; }

  const Eigen::MatrixXd& transition() const noexcept { return transition_; }
  double transition(int s, int a, int s_next) const { return transition_(pair_index(s, a), s_next); }
  Eigen::MatrixXd::ConstRowXpr transition_row(int s, int a) const {
    return transition_.row(pair_index(s, a));
  }

  const Eigen::MatrixXd& cost() const noexcept { return cost_; }
  double cost(int s, int a) const { return cost_(s, a); }

  /// Row-wise running sums of `transition()`, laid out pair-major for sampling.
  std::span<const double> cumulative_row(int s, int a) const {
    return {cumulative_.data() + static_cast<std::size_t>(pair_index(s, a)) * n_states_,
            static_cast<std::size_t>(n_states_)};
  }

 private:
  int n_states_;
  int n_actions_;
  Eigen::MatrixXd transition_;
  Eigen::MatrixXd cost_;
  double gamma_;
  std::vector<double> cumulative_;
};

/// Row-stochastic table pi(a | s).
class Policy {
 public:
  explicit Policy(Eigen::MatrixXd probs);

  static Policy uniform(int n_states, int n_actions);
  static Policy deterministic(std::span<const int> actions, int n_actions);

  const Eigen::MatrixXd& probs() const noexcept { return probs_; }
  double operator()(int s, int a) const { return probs_(s, a); }
  Eigen::MatrixXd::ConstRowXpr row(int s) const { return probs_.row(s); }

  int n_states() const noexcept { return static_cast<int>(probs_.rows()); }
  int n_actions() const noexcept { return static_cast<int>(probs_.cols()); }

 private:
  Eigen::MatrixXd probs_;
};

/// Convex regularizer h applied per state to the action distribution.
struct Regularizer {
  enum class Kind { kNone, kNegativeEntropy };

  Kind kind = Kind::kNone;
  double temperature = 0.0;
  double mu_h = 0.0;
  double subgrad_bound = 0.0;

  static Regularizer none() { return {}; }
  /// tau * sum_a p(a) log p(a); 1-strongly convex times tau w.r.t. the l1 norm.
  static Regularizer negative_entropy(double temperature, double subgrad_bound);

  bool is_none() const noexcept { return kind == Kind::kNone; }
  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& p) const;
};

/// Probabilities are clipped to this floor before any logarithm.
inline constexpr double kLogClip = 1e-12;

bool is_distribution(const Eigen::Ref<const Eigen::VectorXd>& p, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Exact oracles. All are dense direct solves; sizes are desk scale.
// ---------------------------------------------------------------------------

/// P_pi(s, s') = sum_a pi(a|s) P(s'|s,a).
Eigen::MatrixXd policy_kernel(const TabularMdp& mdp, const Policy& pi);
/// c_pi(s) + h(pi(.|s)).
Eigen::VectorXd policy_cost(const TabularMdp& mdp, const Policy& pi, const Regularizer& h);
/// h(pi(.|s)) for every state.
Eigen::VectorXd regularizer_values(const Policy& pi, const Regularizer& h);

ValueFunction exact_value(const TabularMdp& mdp, const Policy& pi,
                          const Regularizer& h = Regularizer::none());
QFunction exact_q(const TabularMdp& mdp, const Policy& pi,
                  const Regularizer& h = Regularizer::none());
/// Q from a given V without re-solving: c + h(pi) + gamma * P V.
QFunction q_from_value(const TabularMdp& mdp, const Policy& pi, const Regularizer& h,
                       const ValueFunction& v);

/// Greedy deterministic policy w.r.t. Q; ties go to the lowest action index.
Policy greedy_policy(const QFunction& q);

struct OptimalSolution {
  Policy policy;
  ValueFunction value;
  int vi_iterations = 0;
};

/// Value iteration to sup-norm tolerance `tol`, greedy extraction, then an
/// exact evaluation of the greedy policy. Only h = none is supported.
OptimalSolution solve_optimal(const TabularMdp& mdp, const Regularizer& h = Regularizer::none(),
                              double tol = 1e-10, int max_iterations = 10'000'000);

/// sup_s (V^pi(s) - V*(s)).
double optimality_gap(const TabularMdp& mdp, const Policy& pi, const ValueFunction& v_star);

/// psi^pi(s, p) = <Q(s,.), p> - V(s) + h(p) - h(pi(.|s)).
double advantage(const TabularMdp& mdp, const Policy& pi, const Regularizer& h, int s,
                 const Eigen::Ref<const Eigen::VectorXd>& p);

/// (1 - gamma) (I - gamma P_pi)^{-1}; row q is the discounted visitation from q.
Eigen::MatrixXd visitation_matrix(const TabularMdp& mdp, const Policy& pi);
StateDistribution discounted_visitation(const TabularMdp& mdp, const Policy& pi, int q);
/// (1 - f) kappa_{s_or} + f * mean_q kappa_q.
StateDistribution mixed_visitation(const TabularMdp& mdp, const Policy& pi, int s_or, double f);

// ---------------------------------------------------------------------------
// Chain diagnostics.
// ---------------------------------------------------------------------------

/// Entries at or below this are treated as absent edges.
inline constexpr double kEdgeThreshold = 1e-14;

/// Strongly connected components of the support graph of a square kernel.
/// Returns the component id of every state.
std::vector<int> strongly_connected_components(const Eigen::MatrixXd& kernel);
bool is_irreducible(const Eigen::MatrixXd& kernel);

/// Unique stationary distribution; throws NotIrreducible when the kernel has
/// more than one closed communicating class.
StateDistribution stationary_distribution(const Eigen::MatrixXd& kernel);
StateDistribution stationary_distribution(const TabularMdp& mdp, const Policy& pi);

struct MixingProfile {
  StateDistribution stationary;
  double envelope = 0.0;  ///< C
  double rate = 1.0;      ///< rho
  bool is_geometric = false;
  std::vector<double> distances;  ///< d(t) = sup_s ||P^t(s,.) - nu||_tv for t = 0..horizon
  double slem = 1.0;              ///< second-largest eigenvalue modulus of the kernel

  double min_stationary() const { return stationary.minCoeff(); }
};

MixingProfile mixing_profile(const Eigen::MatrixXd& kernel, int horizon);
MixingProfile mixing_profile(const TabularMdp& mdp, const Policy& pi, int horizon);

struct ImplicitMixingBounds {
  int block_length = 0;   ///< b-bar
  double rate_bound = 1.0;
  double stationary_floor = 0.0;
};

/// ceil(log(4 / nu_floor) / log(1 / rho)), robust to floating noise at integers.
int mixing_block_length(double nu_floor, double rho);

/// Rate and stationary-floor guarantees for any policy whose probability on
/// the optimal actions is at least `underline_pi`, derived from the mixing of
/// a deterministic optimal policy.
ImplicitMixingBounds implicit_mixing_bounds(const MixingProfile& profile_star, double underline_pi);

}  // namespace autoexplore
