#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "autoexplore/errors.hpp"
#include "autoexplore/mdp.hpp"

namespace autoexplore {

namespace {

constexpr double kDistanceFloor = 1e-12;
constexpr double kEnvelopeCap = 2.0;

std::vector<std::vector<int>> adjacency(const Eigen::MatrixXd& kernel, bool reversed) {
  const int n = static_cast<int>(kernel.rows());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (kernel(i, j) > kEdgeThreshold) {
        if (reversed) {
          adj[static_cast<std::size_t>(j)].push_back(i);
        } else {
          adj[static_cast<std::size_t>(i)].push_back(j);
        }
      }
    }
  }
  return adj;
}

// log of max_t d(t) / rho^t over distances above the noise floor.
double log_envelope(const std::vector<double>& distances, double rho) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < distances.size(); ++t) {
    const double d = distances[t];
    if (d <= kDistanceFloor && t > 0) {
      continue;
    }
    if (d <= 0.0) {
      continue;
    }
    double value = std::log(d);
    if (t > 0) {
      if (rho <= 0.0) {
        return std::numeric_limits<double>::infinity();
      }
      value -= static_cast<double>(t) * std::log(rho);
    }
    best = std::max(best, value);
  }
  return best;
}

double envelope_constant(const std::vector<double>& distances, double rho) {
  const double log_c = log_envelope(distances, rho);
  return std::isinf(log_c) && log_c < 0 ? 0.0 : std::exp(log_c);
}

}  // namespace

std::vector<int> strongly_connected_components(const Eigen::MatrixXd& kernel) {
  if (kernel.rows() != kernel.cols()) {
    throw std::invalid_argument("strongly_connected_components: kernel must be square");
  }
  const int n = static_cast<int>(kernel.rows());
  const auto forward = adjacency(kernel, false);
  const auto backward = adjacency(kernel, true);

  // Kosaraju, iterative first pass to get the finishing order.
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int root = 0; root < n; ++root) {
    if (seen[static_cast<std::size_t>(root)]) {
      continue;
    }
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    seen[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto& out = forward[static_cast<std::size_t>(node)];
      if (next < out.size()) {
        const int child = out[next++];
        if (!seen[static_cast<std::size_t>(child)]) {
          seen[static_cast<std::size_t>(child)] = 1;
          stack.emplace_back(child, 0);
        }
      } else {
        order.push_back(node);
        stack.pop_back();
      }
    }
  }

  std::vector<int> component(static_cast<std::size_t>(n), -1);
  int count = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (component[static_cast<std::size_t>(*it)] >= 0) {
      continue;
    }
    std::vector<int> stack{*it};
    component[static_cast<std::size_t>(*it)] = count;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (const int parent : backward[static_cast<std::size_t>(node)]) {
        if (component[static_cast<std::size_t>(parent)] < 0) {
          component[static_cast<std::size_t>(parent)] = count;
          stack.push_back(parent);
        }
      }
    }
    ++count;
  }
  return component;
}

bool is_irreducible(const Eigen::MatrixXd& kernel) {
  const auto component = strongly_connected_components(kernel);
  return std::all_of(component.begin(), component.end(), [](int c) { return c == 0; });
}

StateDistribution stationary_distribution(const Eigen::MatrixXd& kernel) {
  const int n = static_cast<int>(kernel.rows());
  const auto component = strongly_connected_components(kernel);
  const int n_components = *std::max_element(component.begin(), component.end()) + 1;

  // A component is closed when no edge leaves it.
  std::vector<char> closed(static_cast<std::size_t>(n_components), 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (kernel(i, j) > kEdgeThreshold && component[static_cast<std::size_t>(i)] !=
                                               component[static_cast<std::size_t>(j)]) {
        closed[static_cast<std::size_t>(component[static_cast<std::size_t>(i)])] = 0;
      }
    }
  }
  const auto n_closed = std::count(closed.begin(), closed.end(), 1);
  if (n_closed != 1) {
    throw NotIrreducible("stationary_distribution: chain has " + std::to_string(n_closed) +
                         " closed communicating classes");
  }
  const int closed_id =
      static_cast<int>(std::find(closed.begin(), closed.end(), 1) - closed.begin());

  std::vector<int> members;
  for (int i = 0; i < n; ++i) {
    if (component[static_cast<std::size_t>(i)] == closed_id) {
      members.push_back(i);
    }
  }
  const int m = static_cast<int>(members.size());
  Eigen::MatrixXd system(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      system(r, c) = kernel(members[static_cast<std::size_t>(c)], members[static_cast<std::size_t>(r)]);
    }
  }
  system -= Eigen::MatrixXd::Identity(m, m);
  system.row(m - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs[m - 1] = 1.0;
  const Eigen::VectorXd local = Eigen::FullPivLU<Eigen::MatrixXd>(system).solve(rhs);
  if (!local.allFinite()) {
    throw NumericError("stationary_distribution: linear solve failed");
  }

  StateDistribution nu = StateDistribution::Zero(n);
  for (int r = 0; r < m; ++r) {
    nu[members[static_cast<std::size_t>(r)]] = std::max(local[r], 0.0);
  }
  return nu / nu.sum();
}

StateDistribution stationary_distribution(const TabularMdp& mdp, const Policy& pi) {
  return stationary_distribution(policy_kernel(mdp, pi));
}

MixingProfile mixing_profile(const Eigen::MatrixXd& kernel, int horizon) {
  if (horizon < 1) {
    throw std::invalid_argument("mixing_profile: horizon must be at least 1");
  }
  const int n = static_cast<int>(kernel.rows());
  MixingProfile profile;
  profile.stationary = stationary_distribution(kernel);

  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  profile.distances.reserve(static_cast<std::size_t>(horizon) + 1);
  for (int t = 0; t <= horizon; ++t) {
    double worst = 0.0;
    for (int s = 0; s < n; ++s) {
      worst = std::max(worst, 0.5 * (power.row(s).transpose() - profile.stationary).lpNorm<1>());
    }
    profile.distances.push_back(worst);
    power = power * kernel;
  }

  // Asymptotic rate: the largest eigenvalue modulus once the unit eigenvalue is removed.
  double slem = 0.0;
  if (n > 1) {
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(kernel, false);
    std::vector<std::complex<double>> values(solver.eigenvalues().begin(),
                                             solver.eigenvalues().end());
    const auto unit = std::min_element(values.begin(), values.end(), [](auto x, auto y) {
      return std::abs(x - 1.0) < std::abs(y - 1.0);
    });
    values.erase(unit);
    for (const auto& value : values) {
      slem = std::max(slem, std::abs(value));
    }
  }
  profile.slem = std::min(slem, 1.0);

  if (profile.slem >= 1.0 - 1e-10) {
    profile.rate = 1.0;
    profile.envelope = *std::max_element(profile.distances.begin(), profile.distances.end());
    profile.is_geometric = false;
    return profile;
  }

  double rate = profile.slem;
  if (envelope_constant(profile.distances, rate) > kEnvelopeCap) {
    // Smallest rho above the asymptotic rate whose envelope constant fits under the cap.
    double lo = rate;
    double hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (envelope_constant(profile.distances, mid) <= kEnvelopeCap) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    rate = hi;
  }
  profile.rate = rate;
  profile.envelope = envelope_constant(profile.distances, rate);
  profile.is_geometric = rate < 1.0;
  return profile;
}

MixingProfile mixing_profile(const TabularMdp& mdp, const Policy& pi, int horizon) {
  return mixing_profile(policy_kernel(mdp, pi), horizon);
}

int mixing_block_length(double nu_floor, double rho) {
  if (!(nu_floor > 0.0) || !(rho > 0.0) || !(rho < 1.0)) {
    throw std::invalid_argument("mixing_block_length: need nu_floor > 0 and rho in (0, 1)");
  }
  const double ratio = std::log(4.0 / nu_floor) / std::log(1.0 / rho);
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, std::abs(ratio))) {
    return std::max(1, static_cast<int>(nearest));
  }
  return std::max(1, static_cast<int>(std::ceil(ratio)));
}

ImplicitMixingBounds implicit_mixing_bounds(const MixingProfile& profile_star, double underline_pi) {
  if (!profile_star.is_geometric) {
    throw std::invalid_argument("implicit_mixing_bounds: profile is not geometric");
  }
  if (profile_star.envelope > kEnvelopeCap + 1e-12) {
    throw std::invalid_argument("implicit_mixing_bounds: envelope constant exceeds 2");
  }
  if (profile_star.rate < 0.5 || profile_star.rate >= 1.0) {
    throw std::invalid_argument("implicit_mixing_bounds: rate must lie in [1/2, 1)");
  }
  if (!(underline_pi > 0.0) || underline_pi > 1.0) {
    throw std::invalid_argument("implicit_mixing_bounds: underline_pi must lie in (0, 1]");
  }
  const double nu_floor = profile_star.min_stationary();
  if (!(nu_floor > 0.0)) {
    throw std::invalid_argument("implicit_mixing_bounds: stationary floor must be positive");
  }
  ImplicitMixingBounds bounds;
  bounds.block_length = mixing_block_length(nu_floor, profile_star.rate);
  const double retained = std::pow(underline_pi, bounds.block_length);
  bounds.rate_bound = 1.0 - retained * nu_floor * nu_floor / (2.0 * bounds.block_length);
  bounds.stationary_floor = retained * nu_floor / 2.0;
  return bounds;
}

}  // namespace autoexplore
