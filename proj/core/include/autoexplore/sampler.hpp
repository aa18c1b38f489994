#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "autoexplore/mdp.hpp"
#include "autoexplore/rng.hpp"

namespace autoexplore {

inline constexpr std::int64_t kDefaultSampleBudget = 100'000'000;

struct Transition {
  int state = 0;
  int action = 0;
  double cost = 0.0;
  int next_state = 0;
};

/**
 * Single simulated trajectory. Never resets; every environment transition
 * advances `samples()` by exactly one.
 *
 * Two random substreams derive from the seed: the trajectory stream drives
 * action and next-state draws, the auxiliary stream is reserved for the
 * algorithm's own randomness (origin states, geometric horizons).
 */
class SampleStream {
 public:
  SampleStream(const TabularMdp& mdp, std::uint64_t seed, int initial_state = 0,
               std::int64_t budget = kDefaultSampleBudget);

  const TabularMdp& mdp() const noexcept { return *mdp_; }
  int state() const noexcept { return state_; }
  std::int64_t samples() const noexcept { return samples_; }
  std::int64_t budget() const noexcept { return budget_; }
  void set_budget(std::int64_t budget) { budget_ = budget; }

  /// a ~ pi(.|state), s' ~ P(.|state, a). Throws BudgetExceeded at the cap.
  Transition step(const Policy& pi);
  Transition step_with_action(int action);
  /// a ~ pi(.|s) from the trajectory substream without moving the chain.
  int draw_action(const Policy& pi, int s);

  CounterRng& aux_rng() noexcept { return aux_; }

  /// Keep every transition in memory (debug dumps).
  void enable_trace(bool on) { tracing_ = on; }
  const std::vector<Transition>& trace() const noexcept { return trace_; }

 private:
  const TabularMdp* mdp_;
  CounterRng rng_;
  CounterRng aux_;
  int state_;
  std::int64_t samples_ = 0;
  std::int64_t budget_;
  bool tracing_ = false;
  std::vector<Transition> trace_;
};

/// Index with probability row[i]; the row need not be normalized exactly.
int sample_index(CounterRng& rng, const Eigen::Ref<const Eigen::RowVectorXd>& row);

/// (1 - eps) pi + eps / |A|.
Policy perturb_action_policy(const Policy& pi, double eps);
/// (1 - eps) pi + eps / |S|, rows renormalized to sum to one.
Policy perturb_state_policy(const Policy& pi, double eps);

/// Pair-indexed mask of {(s, a) : pi(a|s) >= underline_pi}.
std::vector<char> nonrare_mask(const Policy& pi, double underline_pi);
/// Sorted pair indices of the same set.
std::vector<int> nonrare_set(const Policy& pi, double underline_pi);

/// First hitting times within a window of length `window`.
struct HittingRecord {
  std::int64_t window = 0;
  std::vector<std::int64_t> tau;  ///< equals `window` when not hit
  std::vector<char> hit;

  static HittingRecord from_window(std::span<const Transition> window, int n_states, int n_actions);
};

/// gamma^(m - tau).
double discounted_hitting(std::int64_t m, std::int64_t tau, double gamma);

/// Truncated on-policy Monte Carlo: sum_{t >= tau(z)} gamma^(t - tau(z)) c_t for
/// hit non-rare pairs, 0 for unhit non-rare pairs, 1/(1 - gamma) for rare pairs.
QFunction tomc_estimate(std::span<const Transition> window, const Policy& pi, double underline_pi,
                        double gamma);

/// Smallest L >= 0 with gamma^L <= threshold.
std::int64_t discount_tail_length(double gamma, double threshold);

struct CollectResult {
  QFunction q;
  std::int64_t m_used = 0;
  std::int64_t samples = 0;
  HittingRecord hits;
  /// max over non-rare z of gamma^(m - tau(z)); 0 when the set is empty.
  double max_discounted_hitting = 0.0;
};

/// Stream on-policy until every non-rare pair z has gamma^(m - tau(z)) <= varsigma (1 - gamma),
/// then return the TOMC estimate over that window.
CollectResult dynamic_mixing_collect(SampleStream& stream, const Policy& pi, double varsigma,
                                     double underline_pi);

struct TwoPhaseResult {
  QFunction q;
  std::int64_t m_used = 0;
  std::int64_t samples = 0;
  std::int64_t phase2_samples = 0;
  int rare_pairs = 0;
};

/// Phase I: dynamic_mixing_collect. Phase II: each rare pair is reached by
/// running the state-exploration policy until (s, a) is drawn, then m_used
/// on-policy steps give its discounted-sum estimate.
TwoPhaseResult two_phase_estimate(SampleStream& stream, const Policy& pi, double varsigma,
                                  double underline_pi, double eps_state);

}  // namespace autoexplore
