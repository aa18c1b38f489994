#include "autoexplore/generators.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

#include "autoexplore/rng.hpp"

namespace autoexplore {

TabularMdp gen_garnet(int n_states, int n_actions, int branching, std::uint64_t seed, double gamma) {
  if (n_states < 1 || n_actions < 1) {
    throw std::invalid_argument("gen_garnet: sizes must be positive");
  }
  if (branching < 1 || branching > n_states) {
    throw std::invalid_argument("gen_garnet: need 1 <= branching <= n_states");
  }
  CounterRng rng(seed, 0x6a72);
  Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(n_states * n_actions, n_states);
  Eigen::MatrixXd cost(n_states, n_actions);
  std::vector<int> states(static_cast<std::size_t>(n_states));
  for (int z = 0; z < n_states * n_actions; ++z) {
    std::iota(states.begin(), states.end(), 0);
    // Partial Fisher-Yates: the first `branching` entries are the successors.
    for (int i = 0; i < branching; ++i) {
      const int j = i + rng.uniform_int(n_states - i);
      std::swap(states[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(j)]);
    }
    std::vector<double> mass(static_cast<std::size_t>(branching));
    double total = 0.0;
    for (auto& x : mass) {
      x = rng.exponential();
      total += x;
    }
    for (int i = 0; i < branching; ++i) {
      transition(z, states[static_cast<std::size_t>(i)]) = mass[static_cast<std::size_t>(i)] / total;
    }
  }
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      cost(s, a) = rng.uniform();
    }
  }
  return TabularMdp(n_states, n_actions, std::move(transition), std::move(cost), gamma);
}

TabularMdp gen_hard_chain(int n_states, double slip, double gamma) {
  if (n_states < 2) {
    throw std::invalid_argument("gen_hard_chain: need at least 2 states");
  }
  if (!(slip >= 0.0 && slip < 1.0)) {
    throw std::invalid_argument("gen_hard_chain: slip must lie in [0, 1)");
  }
  constexpr int kLeft = 0;
  constexpr int kRight = 1;
  const int end = n_states - 1;
  Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(n_states * 2, n_states);
  Eigen::MatrixXd cost(n_states, 2);
  for (int s = 0; s < n_states; ++s) {
    const int back = s > 0 ? s - 1 : 0;
    const int forward = s < end ? s + 1 : end;
    transition(s * 2 + kLeft, back) = 1.0;
    transition(s * 2 + kRight, forward) += 1.0 - slip;
    transition(s * 2 + kRight, back) += slip;
    const double c = s == 0 ? 0.8 : (s == end ? 0.0 : 1.0);
    cost(s, kLeft) = c;
    cost(s, kRight) = c;
  }
  return TabularMdp(n_states, 2, std::move(transition), std::move(cost), gamma);
}

}  // namespace autoexplore
