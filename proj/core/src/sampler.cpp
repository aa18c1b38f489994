#include "autoexplore/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "autoexplore/errors.hpp"

namespace autoexplore {

SampleStream::SampleStream(const TabularMdp& mdp, std::uint64_t seed, int initial_state,
                           std::int64_t budget)
    : mdp_(&mdp), rng_(seed, 0), aux_(seed, 1), state_(initial_state), budget_(budget) {
  if (initial_state < 0 || initial_state >= mdp.n_states()) {
    throw std::invalid_argument("SampleStream: initial state out of range");
  }
  if (budget <= 0) {
    throw std::invalid_argument("SampleStream: budget must be positive");
  }
}

int sample_index(CounterRng& rng, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double target = rng.uniform() * row.sum();
  double running = 0.0;
  const Eigen::Index n = row.size();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    running += row[i];
    if (target < running) {
      return static_cast<int>(i);
    }
  }
  // Never land on a trailing zero-probability entry through round-off.
  Eigen::Index last = n - 1;
  while (last > 0 && row[last] <= 0.0) {
    --last;
  }
  return static_cast<int>(last);
}

Transition SampleStream::step_with_action(int action) {
  if (action < 0 || action >= mdp_->n_actions()) {
    throw std::invalid_argument("SampleStream: action out of range");
  }
  if (samples_ >= budget_) {
    throw BudgetExceeded(budget_, "SampleStream::step");
  }
  Transition tr;
  tr.state = state_;
  tr.action = action;
  tr.cost = mdp_->cost(state_, action);
  tr.next_state = sample_index(rng_, mdp_->transition_row(state_, action));
  state_ = tr.next_state;
  ++samples_;
  if (tracing_) {
    trace_.push_back(tr);
  }
  return tr;
}

Transition SampleStream::step(const Policy& pi) {
  return step_with_action(draw_action(pi, state_));
}

int SampleStream::draw_action(const Policy& pi, int s) {
  return sample_index(rng_, pi.row(s));
}

Policy perturb_action_policy(const Policy& pi, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("perturb_action_policy: eps must lie in [0, 1]");
  }
  return Policy((1.0 - eps) * pi.probs().array() + eps / pi.n_actions());
}

Policy perturb_state_policy(const Policy& pi, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("perturb_state_policy: eps must lie in [0, 1]");
  }
  Eigen::MatrixXd mixed = (1.0 - eps) * pi.probs().array() + eps / pi.n_states();
  for (Eigen::Index s = 0; s < mixed.rows(); ++s) {
    mixed.row(s) /= mixed.row(s).sum();
  }
  return Policy(std::move(mixed));
}

std::vector<char> nonrare_mask(const Policy& pi, double underline_pi) {
  std::vector<char> mask(static_cast<std::size_t>(pi.n_states()) * pi.n_actions(), 0);
  for (int s = 0; s < pi.n_states(); ++s) {
    for (int a = 0; a < pi.n_actions(); ++a) {
      mask[static_cast<std::size_t>(s) * pi.n_actions() + a] = pi(s, a) >= underline_pi;
    }
  }
  return mask;
}

std::vector<int> nonrare_set(const Policy& pi, double underline_pi) {
  const auto mask = nonrare_mask(pi, underline_pi);
  std::vector<int> out;
  for (std::size_t z = 0; z < mask.size(); ++z) {
    if (mask[z]) {
      out.push_back(static_cast<int>(z));
    }
  }
  return out;
}

HittingRecord HittingRecord::from_window(std::span<const Transition> window, int n_states,
                                         int n_actions) {
  HittingRecord rec;
  rec.window = static_cast<std::int64_t>(window.size());
  const auto n_pairs = static_cast<std::size_t>(n_states) * n_actions;
  rec.tau.assign(n_pairs, rec.window);
  rec.hit.assign(n_pairs, 0);
  for (std::size_t t = 0; t < window.size(); ++t) {
    const auto z = static_cast<std::size_t>(window[t].state) * n_actions + window[t].action;
    if (!rec.hit[z]) {
      rec.hit[z] = 1;
      rec.tau[z] = static_cast<std::int64_t>(t);
    }
  }
  return rec;
}

double discounted_hitting(std::int64_t m, std::int64_t tau, double gamma) {
  if (tau < 0 || tau > m) {
    throw std::invalid_argument("discounted_hitting: need 0 <= tau <= m");
  }
  return std::pow(gamma, static_cast<double>(m - tau));
}

QFunction tomc_estimate(std::span<const Transition> window, const Policy& pi, double underline_pi,
                        double gamma) {
  const int n_actions = pi.n_actions();
  const auto m = window.size();
  std::vector<double> tail(m + 1, 0.0);
  for (std::size_t t = m; t-- > 0;) {
    tail[t] = window[t].cost + gamma * tail[t + 1];
  }
  const auto hits = HittingRecord::from_window(window, pi.n_states(), n_actions);
  const auto mask = nonrare_mask(pi, underline_pi);
  QFunction q(pi.n_states(), n_actions);
  for (int s = 0; s < pi.n_states(); ++s) {
    for (int a = 0; a < n_actions; ++a) {
      const auto z = static_cast<std::size_t>(s) * n_actions + a;
      if (!mask[z]) {
        q(s, a) = 1.0 / (1.0 - gamma);
      } else if (hits.hit[z]) {
        q(s, a) = tail[static_cast<std::size_t>(hits.tau[z])];
      } else {
        q(s, a) = 0.0;
      }
    }
  }
  return q;
}

std::int64_t discount_tail_length(double gamma, double threshold) {
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("discount_tail_length: threshold must be positive");
  }
  if (threshold >= 1.0) {
    return 0;
  }
  if (gamma == 0.0) {
    return 1;
  }
  auto length = static_cast<std::int64_t>(std::ceil(std::log(threshold) / std::log(gamma)));
  length = std::max<std::int64_t>(length, 0);
  while (length > 0 && std::pow(gamma, static_cast<double>(length - 1)) <= threshold) {
    --length;
  }
  while (std::pow(gamma, static_cast<double>(length)) > threshold) {
    ++length;
  }
  return length;
}

CollectResult dynamic_mixing_collect(SampleStream& stream, const Policy& pi, double varsigma,
                                     double underline_pi) {
  if (!(varsigma > 0.0)) {
    throw std::invalid_argument("dynamic_mixing_collect: varsigma must be positive");
  }
  const TabularMdp& mdp = stream.mdp();
  const double gamma = mdp.gamma();
  const double threshold = varsigma * (1.0 - gamma);
  const auto mask = nonrare_mask(pi, underline_pi);
  auto remaining = std::count(mask.begin(), mask.end(), 1);

  const std::int64_t start = stream.samples();
  std::vector<Transition> window;
  std::vector<char> seen(mask.size(), 0);
  std::int64_t m_used = 1;
  if (remaining > 0 && threshold < 1.0) {
    std::int64_t last_first_hit = 0;
    while (remaining > 0) {
      const Transition tr = stream.step(pi);
      const auto z = static_cast<std::size_t>(mdp.pair_index(tr.state, tr.action));
      if (mask[z] && !seen[z]) {
        seen[z] = 1;
        --remaining;
        last_first_hit = static_cast<std::int64_t>(window.size());
      }
      window.push_back(tr);
    }
    m_used = last_first_hit + discount_tail_length(gamma, threshold);
  }
  while (static_cast<std::int64_t>(window.size()) < m_used) {
    window.push_back(stream.step(pi));
  }

  CollectResult out;
  out.q = tomc_estimate(window, pi, underline_pi, gamma);
  out.m_used = m_used;
  out.samples = stream.samples() - start;
  out.hits = HittingRecord::from_window(window, mdp.n_states(), mdp.n_actions());
  for (std::size_t z = 0; z < mask.size(); ++z) {
    if (mask[z]) {
      out.max_discounted_hitting =
          std::max(out.max_discounted_hitting, discounted_hitting(m_used, out.hits.tau[z], gamma));
    }
  }
  return out;
}

TwoPhaseResult two_phase_estimate(SampleStream& stream, const Policy& pi, double varsigma,
                                  double underline_pi, double eps_state) {
  if (!(eps_state > 0.0 && eps_state <= 1.0)) {
    throw std::invalid_argument("two_phase_estimate: eps_state must lie in (0, 1]");
  }
  const TabularMdp& mdp = stream.mdp();
  const double gamma = mdp.gamma();
  const std::int64_t start = stream.samples();

  CollectResult phase1 = dynamic_mixing_collect(stream, pi, varsigma, underline_pi);
  TwoPhaseResult out;
  out.q = std::move(phase1.q);
  out.m_used = phase1.m_used;

  const auto mask = nonrare_mask(pi, underline_pi);
  const Policy explore = perturb_state_policy(pi, eps_state);
  const std::int64_t phase2_start = stream.samples();
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      if (mask[static_cast<std::size_t>(mdp.pair_index(s, a))]) {
        continue;
      }
      ++out.rare_pairs;
      Transition tr = stream.step(explore);
      while (tr.state != s || tr.action != a) {
        tr = stream.step(explore);
      }
      double total = tr.cost;
      double discount = 1.0;
      for (std::int64_t t = 1; t < out.m_used; ++t) {
        discount *= gamma;
        total += discount * stream.step(pi).cost;
      }
      out.q(s, a) = total;
    }
  }
  out.phase2_samples = stream.samples() - phase2_start;
  out.samples = stream.samples() - start;
  return out;
}

}  // namespace autoexplore
