#include "autoexplore/paramfree.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace autoexplore {

int doubling_epochs(double underline_kappa) {
  if (!(underline_kappa > 0.0 && underline_kappa <= 1.0)) {
    throw std::invalid_argument("doubling_epochs: underline_kappa must lie in (0, 1]");
  }
  const double raw = std::log2(1.0 / underline_kappa);
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) <= 1e-12) {
    return static_cast<int>(nearest);
  }
  return static_cast<int>(std::ceil(raw));
}

double kappa_preset_with_frequency(double gamma, double f, int n_states) {
  if (!(f > 0.0 && f <= 1.0)) {
    throw std::invalid_argument("kappa_preset_with_frequency: f must lie in (0, 1]");
  }
  if (n_states <= 0) {
    throw std::invalid_argument("kappa_preset_with_frequency: n_states must be positive");
  }
  return (1.0 - gamma) * f / n_states;
}

double certified_gap_bound(double epsilon, double gamma, double k, int n_states, double delta) {
  const double l = std::log2(8.0 * k * n_states / delta);
  return 6.0 * epsilon / (1.0 - gamma) * l * l;
}

nlohmann::json ParamfreeResult::summary() const {
  nlohmann::json j = {{"certified", certified},
                      {"epoch", epoch},
                      {"total_samples", total_samples},
                      {"k", k}};
  if (!std::isnan(final_gap_oracle)) {
    j["final_gap_oracle"] = final_gap_oracle;
  }
  return j;
}

ParamfreeResult paramfree_run(SampleStream& stream, const FeatureMap& fmap,
                              const ParamfreeConfig& config, const TabularMdp* oracle) {
  const TabularMdp& mdp = stream.mdp();
  const int last_epoch = doubling_epochs(config.underline_kappa);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::optional<ValueFunction> v_star;
  if (oracle != nullptr) {
    v_star = solve_optimal(*oracle).value;
  }
  const int replicates = certificate_replicates(mdp.gamma(), config.epsilon, config.desk.cert_div);
  const double half_delta = config.delta / 2.0;

  ParamfreeResult out{Policy::uniform(mdp.n_states(), mdp.n_actions()), false, 0, 0, 0, nan, {}, {}};
  out.record = RunRecord({"iter", "samples_cum", "kappa_tilde", "gap_estimate", "threshold",
                          "certified", "gap_linf"});
  const std::int64_t start = stream.samples();
  for (int ep = 0; ep <= last_epoch; ++ep) {
    EpochRecord rec;
    rec.epoch = ep;
    rec.kappa_tilde = std::ldexp(1.0, -ep);
    SpmdCtdConfig cfg = synth_params(mdp.gamma(), fmap, mdp.n_actions(), mdp.n_states(),
                                     config.epsilon, half_delta, rec.kappa_tilde, config.desk);
    // The certificate keeps the formula value of the state-exploration rate.
    const double cert_explore = cfg.eps_state;
    if (config.state_exploration) {
      cfg.f = config.f;
    } else {
      cfg.f = 0.0;
      cfg.eps_state = 0.0;
    }
    rec.k = cfg.k;

    const std::int64_t before = stream.samples();
    SpmdCtdResult run = spmd_ctd_run(stream, fmap, cfg, nullptr, nullptr);
    rec.ctd_samples = stream.samples() - before;

    const GapEstimate gap = estimate_gap(stream, run.policy, config.epsilon / 2.0, replicates,
                                         cert_explore, cert_explore);
    rec.certificate_samples = gap.samples;
    rec.gap_estimate = gap.max;
    rec.threshold = certificate_threshold(config.epsilon, static_cast<double>(cfg.k), mdp.n_pairs(),
                                          half_delta);
    rec.certified = certificate_passes(gap, config.epsilon, static_cast<double>(cfg.k),
                                       mdp.n_pairs(), half_delta);
    rec.gap_oracle = v_star ? optimality_gap(*oracle, run.policy, *v_star) : nan;

    out.policy = std::move(run.policy);
    out.epoch = ep;
    out.k = cfg.k;
    out.certified = rec.certified;
    out.final_gap_oracle = rec.gap_oracle;
    out.epochs.push_back(rec);
    out.record.add_row({static_cast<double>(ep), static_cast<double>(stream.samples() - start),
                        rec.kappa_tilde, rec.gap_estimate, rec.threshold,
                        rec.certified ? 1.0 : 0.0, rec.gap_oracle});
    if (rec.certified) {
      break;
    }
  }
  out.total_samples = stream.samples() - start;
  out.record.summary() = out.summary();
  return out;
}

}  // namespace autoexplore
