#include "autoexplore/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "autoexplore/errors.hpp"

namespace autoexplore {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) {
    throw std::invalid_argument(message);
  }
}

}  // namespace

TabularMdp::TabularMdp(int n_states, int n_actions, Eigen::MatrixXd transition,
                       Eigen::MatrixXd cost, double gamma)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      cost_(std::move(cost)),
      gamma_(gamma) {
  require(n_states_ > 0 && n_actions_ > 0, "TabularMdp: sizes must be positive");
  require(transition_.rows() == n_pairs() && transition_.cols() == n_states_,
          "TabularMdp: transition must be (n_states*n_actions) x n_states");
  require(cost_.rows() == n_states_ && cost_.cols() == n_actions_,
          "TabularMdp: cost must be n_states x n_actions");
  require(gamma_ >= 0.0 && gamma_ < 1.0, "TabularMdp: gamma must lie in [0, 1)");
  require(transition_.allFinite() && cost_.allFinite(), "TabularMdp: non-finite entries");
  require(transition_.minCoeff() >= 0.0, "TabularMdp: negative transition probability");
  for (int z = 0; z < n_pairs(); ++z) {
    const double total = transition_.row(z).sum();
    require(std::abs(total - 1.0) <= kSimplexTolerance,
            "TabularMdp: transition row " + std::to_string(z) + " sums to " +
                std::to_string(total));
  }
  require(cost_.minCoeff() >= 0.0 && cost_.maxCoeff() <= 1.0,
          "TabularMdp: costs must lie in [0, 1]");

  cumulative_.resize(static_cast<std::size_t>(n_pairs()) * n_states_);
  for (int z = 0; z < n_pairs(); ++z) {
    double running = 0.0;
    for (int s = 0; s < n_states_; ++s) {
      running += transition_(z, s);
      cumulative_[static_cast<std::size_t>(z) * n_states_ + s] = running;
    }
  }
}

Policy::Policy(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  require(probs_.rows() > 0 && probs_.cols() > 0, "Policy: empty table");
  require(probs_.allFinite(), "Policy: non-finite entries");
  require(probs_.minCoeff() >= 0.0, "Policy: negative probability");
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    require(std::abs(probs_.row(s).sum() - 1.0) <= kSimplexTolerance,
            "Policy: row " + std::to_string(s) + " is not a distribution");
  }
}

Policy Policy::uniform(int n_states, int n_actions) {
  return Policy(Eigen::MatrixXd::Constant(n_states, n_actions, 1.0 / n_actions));
}

Policy Policy::deterministic(std::span<const int> actions, int n_actions) {
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(actions.size()), n_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    require(actions[s] >= 0 && actions[s] < n_actions, "Policy::deterministic: bad action");
    probs(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
  }
  return Policy(std::move(probs));
}

Regularizer Regularizer::negative_entropy(double temperature, double subgrad_bound) {
  require(temperature > 0.0, "Regularizer: temperature must be positive");
  require(subgrad_bound >= 0.0, "Regularizer: subgradient bound must be nonnegative");
  Regularizer h;
  h.kind = Kind::kNegativeEntropy;
  h.temperature = temperature;
  h.mu_h = temperature;
  h.subgrad_bound = subgrad_bound;
  return h;
}

double Regularizer::evaluate(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  if (kind == Kind::kNone) {
    return 0.0;
  }
  double total = 0.0;
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    const double x = std::max(p[a], kLogClip);
    total += x * std::log(x);
  }
  return temperature * total;
}

bool is_distribution(const Eigen::Ref<const Eigen::VectorXd>& p, double tol) {
  return p.size() > 0 && p.allFinite() && p.minCoeff() >= -tol && std::abs(p.sum() - 1.0) <= tol;
}

Eigen::MatrixXd policy_kernel(const TabularMdp& mdp, const Policy& pi) {
  require(pi.n_states() == mdp.n_states() && pi.n_actions() == mdp.n_actions(),
          "policy_kernel: policy shape does not match the MDP");
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(mdp.n_states(), mdp.n_states());
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      kernel.row(s) += pi(s, a) * mdp.transition_row(s, a);
    }
  }
  return kernel;
}

Eigen::VectorXd regularizer_values(const Policy& pi, const Regularizer& h) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(pi.n_states());
  if (h.is_none()) {
    return values;
  }
  for (int s = 0; s < pi.n_states(); ++s) {
    values[s] = h.evaluate(pi.row(s).transpose());
  }
  return values;
}

Eigen::VectorXd policy_cost(const TabularMdp& mdp, const Policy& pi, const Regularizer& h) {
  Eigen::VectorXd c = mdp.cost().cwiseProduct(pi.probs()).rowwise().sum();
  return c + regularizer_values(pi, h);
}

ValueFunction exact_value(const TabularMdp& mdp, const Policy& pi, const Regularizer& h) {
  const int n = mdp.n_states();
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - mdp.gamma() * policy_kernel(mdp, pi);
  const Eigen::VectorXd rhs = policy_cost(mdp, pi, h);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  ValueFunction v = lu.solve(rhs);
  if (!v.allFinite() || (system * v - rhs).lpNorm<Eigen::Infinity>() > 1e-9) {
    throw NumericError("exact_value: linear solve failed");
  }
  return v;
}

QFunction q_from_value(const TabularMdp& mdp, const Policy& pi, const Regularizer& h,
                       const ValueFunction& v) {
  const Eigen::VectorXd hv = regularizer_values(pi, h);
  QFunction q(mdp.n_states(), mdp.n_actions());
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      q(s, a) = mdp.cost(s, a) + hv[s] + mdp.gamma() * mdp.transition_row(s, a).dot(v);
    }
  }
  return q;
}

QFunction exact_q(const TabularMdp& mdp, const Policy& pi, const Regularizer& h) {
  return q_from_value(mdp, pi, h, exact_value(mdp, pi, h));
}

Policy greedy_policy(const QFunction& q) {
  std::vector<int> actions(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    int best = 0;
    for (Eigen::Index a = 1; a < q.cols(); ++a) {
      if (q(s, a) < q(s, best)) {
        best = static_cast<int>(a);
      }
    }
    actions[static_cast<std::size_t>(s)] = best;
  }
  return Policy::deterministic(actions, static_cast<int>(q.cols()));
}

OptimalSolution solve_optimal(const TabularMdp& mdp, const Regularizer& h, double tol,
                              int max_iterations) {
  require(h.is_none(), "solve_optimal: only the unregularized problem is supported");
  const int n = mdp.n_states();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  QFunction q(n, mdp.n_actions());
  int iteration = 0;
  for (; iteration < max_iterations; ++iteration) {
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < mdp.n_actions(); ++a) {
        q(s, a) = mdp.cost(s, a) + mdp.gamma() * mdp.transition_row(s, a).dot(v);
      }
    }
    const Eigen::VectorXd next = q.rowwise().minCoeff();
    const double change = (next - v).lpNorm<Eigen::Infinity>();
    v = next;
    if (change <= tol) {
      ++iteration;
      break;
    }
  }
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      q(s, a) = mdp.cost(s, a) + mdp.gamma() * mdp.transition_row(s, a).dot(v);
    }
  }
  Policy greedy = greedy_policy(q);
  ValueFunction value = exact_value(mdp, greedy);
  return {std::move(greedy), std::move(value), iteration};
}

double optimality_gap(const TabularMdp& mdp, const Policy& pi, const ValueFunction& v_star) {
  return (exact_value(mdp, pi) - v_star).maxCoeff();
}

double advantage(const TabularMdp& mdp, const Policy& pi, const Regularizer& h, int s,
                 const Eigen::Ref<const Eigen::VectorXd>& p) {
  require(s >= 0 && s < mdp.n_states(), "advantage: state out of range");
  require(p.size() == mdp.n_actions() && is_distribution(p), "advantage: p must be a distribution");
  const ValueFunction v = exact_value(mdp, pi, h);
  const QFunction q = q_from_value(mdp, pi, h, v);
  return q.row(s).dot(p) - v[s] + h.evaluate(p) - h.evaluate(pi.row(s).transpose());
}

Eigen::MatrixXd visitation_matrix(const TabularMdp& mdp, const Policy& pi) {
  const int n = mdp.n_states();
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - mdp.gamma() * policy_kernel(mdp, pi);
  Eigen::MatrixXd kappa =
      (1.0 - mdp.gamma()) * Eigen::PartialPivLU<Eigen::MatrixXd>(system).inverse();
  if (!kappa.allFinite()) {
    throw NumericError("visitation_matrix: inverse failed");
  }
  // Round-off can leave entries at -1e-17; the true values are nonnegative.
  return kappa.cwiseMax(0.0);
}

StateDistribution discounted_visitation(const TabularMdp& mdp, const Policy& pi, int q) {
  require(q >= 0 && q < mdp.n_states(), "discounted_visitation: state out of range");
  return visitation_matrix(mdp, pi).row(q).transpose();
}

StateDistribution mixed_visitation(const TabularMdp& mdp, const Policy& pi, int s_or, double f) {
  require(s_or >= 0 && s_or < mdp.n_states(), "mixed_visitation: origin state out of range");
  require(f >= 0.0 && f <= 1.0, "mixed_visitation: frequency must lie in [0, 1]");
  const Eigen::MatrixXd kappa = visitation_matrix(mdp, pi);
  const Eigen::VectorXd uniform_start = kappa.colwise().mean().transpose();
  return (1.0 - f) * kappa.row(s_or).transpose() + f * uniform_start;
}

}  // namespace autoexplore
