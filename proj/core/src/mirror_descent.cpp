#include "autoexplore/mirror_descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "autoexplore/errors.hpp"

namespace autoexplore {

namespace {

constexpr int kMaxDoublings = 200;
constexpr int kMaxBisections = 400;

Eigen::VectorXd clipped(const Eigen::Ref<const Eigen::VectorXd>& u) {
  return u.cwiseMax(kLogClip);
}

void check_simplex(const Eigen::Ref<const Eigen::VectorXd>& u, const char* what) {
  if (u.size() == 0 || !u.allFinite() || u.minCoeff() < -1e-9 || std::abs(u.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(what) + " is not a probability vector");
  }
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double top = logits.maxCoeff();
  Eigen::VectorXd out = (logits.array() - top).exp();
  return out / out.sum();
}

// Unregularized Tsallis prox. With d_a = b_a - min b, where
// b_a = pi_a^{p-1} + (1-p) eta q_a, the solution is (d_a + x)^{1/(p-1)} for the
// unique x > 0 making the entries sum to one.
Eigen::VectorXd tsallis_prox(const Eigen::VectorXd& pi, const Eigen::VectorXd& q, double eta,
                             double p, double tol) {
  const Eigen::Index n = pi.size();
  Eigen::VectorXd b(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    b[a] = std::pow(pi[a], p - 1.0) + (1.0 - p) * eta * q[a];
  }
  const Eigen::VectorXd d = b.array() - b.minCoeff();
  const double expo = 1.0 / (p - 1.0);
  auto mass = [&](double x) {
    double total = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      total += std::pow(d[a] + x, expo);
    }
    return total;
  };

  // mass(x) >= x^{1/(p-1)} > 1 for x < 1, so the root lies above 1.
  double lo = 1.0;
  double hi = 2.0;
  int doublings = 0;
  while (mass(hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > kMaxDoublings) {
      throw BisectionFailed("spmd_step: could not bracket the Tsallis multiplier");
    }
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < kMaxBisections; ++iter) {
    x = 0.5 * (lo + hi);
    const double total = mass(x);
    if (std::abs(total - 1.0) <= tol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      break;
    }
    (total > 1.0 ? lo : hi) = x;
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    out[a] = std::pow(d[a] + x, expo);
  }
  return out / out.sum();
}

// Solve tau * x - exp((p-1) x) / ((1-p) eta) = target for x = log(upsilon).
double tsallis_entropy_coordinate(double target, double tau, double eta, double p) {
  const double scale = 1.0 / ((1.0 - p) * eta);
  auto g = [&](double x) { return tau * x - std::exp((p - 1.0) * x) * scale; };
  double lo = -1.0;
  double hi = 1.0;
  int doublings = 0;
  while (g(lo) > target) {
    lo *= 2.0;
    if (++doublings > kMaxDoublings) {
      throw BisectionFailed("spmd_step: could not bracket a coordinate");
    }
  }
  while (g(hi) < target) {
    hi *= 2.0;
    if (++doublings > kMaxDoublings) {
      throw BisectionFailed("spmd_step: could not bracket a coordinate");
    }
  }
  for (int iter = 0; iter < kMaxBisections && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd tsallis_entropy_prox(const Eigen::VectorXd& pi, const Eigen::VectorXd& q,
                                     double tau, double eta, double p, double tol) {
  const Eigen::Index n = pi.size();
  const double scale = 1.0 / ((1.0 - p) * eta);
  auto g = [&](double x) { return tau * x - std::exp((p - 1.0) * x) * scale; };
  Eigen::VectorXd offset(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    offset[a] = -q[a] - tau - std::pow(pi[a], p - 1.0) * scale;
  }
  // lambda at which coordinate a equals exp(x): offset_a - g(x).
  const double lam_lo = (offset.array() - g(0.0)).minCoeff();
  const double lam_hi = (offset.array() - g(-std::log(static_cast<double>(n)))).maxCoeff();

  Eigen::VectorXd logs(n);
  auto mass = [&](double lambda) {
    for (Eigen::Index a = 0; a < n; ++a) {
      logs[a] = tsallis_entropy_coordinate(offset[a] - lambda, tau, eta, p);
    }
    return logs.array().exp().sum();
  };
  double lo = lam_lo;
  double hi = lam_hi;
  for (int iter = 0; iter < kMaxBisections; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double total = mass(mid);
    if (std::abs(total - 1.0) <= tol || hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) {
      break;
    }
    (total > 1.0 ? lo : hi) = mid;
  }
  Eigen::VectorXd out = logs.array().exp();
  return out / out.sum();
}

}  // namespace

DistanceGenerator DistanceGenerator::tsallis(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("DistanceGenerator: Tsallis index must lie in (0, 1)");
  }
  DistanceGenerator dgf;
  dgf.kind = Kind::kTsallis;
  dgf.p = p;
  return dgf;
}

DistanceGenerator DistanceGenerator::for_discount(double gamma) {
  return tsallis(tsallis_index(gamma));
}

double tsallis_index(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("tsallis_index: gamma must lie in [0, 1)");
  }
  const double log_horizon = std::log2(1.0 / (1.0 - gamma));
  if (log_horizon <= 2.0) {
    return 0.5;
  }
  return 1.0 / log_horizon;
}

double DistanceGenerator::omega(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  const Eigen::VectorXd x = clipped(u);
  if (kind == Kind::kKl) {
    return (x.array() * x.array().log()).sum();
  }
  return -x.array().pow(p).sum() / ((1.0 - p) * p);
}

Eigen::VectorXd DistanceGenerator::gradient(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  const Eigen::VectorXd x = clipped(u);
  if (kind == Kind::kKl) {
    return x.array().log() + 1.0;
  }
  return -x.array().pow(p - 1.0) / (1.0 - p);
}

double bregman(const DistanceGenerator& dgf, const Eigen::Ref<const Eigen::VectorXd>& u,
               const Eigen::Ref<const Eigen::VectorXd>& v) {
  check_simplex(u, "bregman: u");
  check_simplex(v, "bregman: v");
  if (u.size() != v.size()) {
    throw std::invalid_argument("bregman: size mismatch");
  }
  const Eigen::VectorXd uc = clipped(u);
  const Eigen::VectorXd vc = clipped(v);
  const double value = dgf.omega(vc) - dgf.omega(uc) - dgf.gradient(uc).dot(vc - uc);
  return std::max(value, 0.0);
}

Eigen::VectorXd spmd_step(const Eigen::Ref<const Eigen::VectorXd>& pi_s,
                          const Eigen::Ref<const Eigen::VectorXd>& q_row, const Regularizer& h,
                          double eta, const DistanceGenerator& dgf, double tol) {
  check_simplex(pi_s, "spmd_step: pi_s");
  if (q_row.size() != pi_s.size()) {
    throw std::invalid_argument("spmd_step: q_row size does not match pi_s");
  }
  if (!q_row.allFinite()) {
    throw std::invalid_argument("spmd_step: q_row must be finite");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("spmd_step: eta must be positive");
  }
  if (h.is_none() && q_row.maxCoeff() == q_row.minCoeff()) {
    return pi_s;
  }
  const Eigen::VectorXd pi = clipped(pi_s);
  const Eigen::VectorXd q = q_row;
  const double tau = h.is_none() ? 0.0 : h.temperature;

  if (dgf.kind == DistanceGenerator::Kind::kKl) {
    const Eigen::VectorXd logits = (pi.array().log() - eta * q.array()) / (1.0 + eta * tau);
    return softmax(logits);
  }
  if (h.is_none()) {
    return tsallis_prox(pi, q, eta, dgf.p, tol);
  }
  return tsallis_entropy_prox(pi, q, tau, eta, dgf.p, tol);
}

Policy spmd_update(const Policy& pi, const QFunction& q, const Regularizer& h, double eta,
                   const DistanceGenerator& dgf, double tol) {
  if (q.rows() != pi.n_states() || q.cols() != pi.n_actions()) {
    throw std::invalid_argument("spmd_update: Q shape does not match the policy");
  }
  Eigen::MatrixXd next(pi.n_states(), pi.n_actions());
  for (int s = 0; s < pi.n_states(); ++s) {
    next.row(s) = spmd_step(pi.row(s).transpose(), q.row(s).transpose(), h, eta, dgf, tol).transpose();
  }
  return Policy(std::move(next));
}

double SpmdConfig::eta(std::int64_t t) const {
  const double denom = anytime ? static_cast<double>(t + 1) : static_cast<double>(k);
  return alpha / std::sqrt(denom);
}

void SpmdConfig::validate() const {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("SpmdConfig: alpha must be positive");
  }
  if (k < 0) {
    throw std::invalid_argument("SpmdConfig: k must be nonnegative");
  }
  if (dgf.kind == DistanceGenerator::Kind::kTsallis && !(dgf.p > 0.0 && dgf.p < 1.0)) {
    throw std::invalid_argument("SpmdConfig: Tsallis index must lie in (0, 1)");
  }
}

SpmdRunResult spmd_run(const Policy& pi0, const QEstimator& estimator, const SpmdConfig& config,
                       const Regularizer& h, const TabularMdp* oracle) {
  config.validate();
  std::optional<ValueFunction> v_star;
  if (oracle != nullptr && h.is_none()) {
    v_star = solve_optimal(*oracle).value;
  }
  auto gap = [&](const Policy& pi) {
    return v_star ? optimality_gap(*oracle, pi, *v_star) : std::numeric_limits<double>::quiet_NaN();
  };

  RunRecord record({"iter", "gap_linf"});
  Policy pi = pi0;
  record.add_row({0.0, gap(pi)});
  for (std::int64_t t = 0; t < config.k; ++t) {
    const QFunction q = estimator(pi, t);
    pi = spmd_update(pi, q, h, config.eta(t), config.dgf, config.tolerance);
    record.add_row({static_cast<double>(t + 1), gap(pi)});
  }
  record.summary()["final_gap_linf"] = record.last("gap_linf");
  return {std::move(pi), std::move(record)};
}

}  // namespace autoexplore
