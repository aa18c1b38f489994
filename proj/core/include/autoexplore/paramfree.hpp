#pragma once

#include <json.hpp>

#include <cstdint>
#include <vector>

#include "autoexplore/certificate.hpp"
#include "autoexplore/spmd_ctd.hpp"

namespace autoexplore {

struct ParamfreeConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  double f = 0.5;
  double underline_kappa = 0.5;
  /// false: f = 0 and no state exploration inside CTD.
  bool state_exploration = true;
  DeskScale desk;
};

struct EpochRecord {
  int epoch = 0;
  double kappa_tilde = 1.0;
  bool certified = false;
  std::int64_t ctd_samples = 0;
  std::int64_t certificate_samples = 0;
  double gap_estimate = 0.0;
  double threshold = 0.0;
  double gap_oracle = 0.0;  ///< NaN without an oracle
  std::int64_t k = 0;
};

struct ParamfreeResult {
  Policy policy;
  bool certified = false;
  int epoch = 0;
  std::int64_t total_samples = 0;
  std::int64_t k = 0;  ///< SPMD iterations of the returned epoch
  double final_gap_oracle = 0.0;
  std::vector<EpochRecord> epochs;
  RunRecord record;  ///< one row per epoch

  nlohmann::json summary() const;
};

/// ceil(log2(1 / underline_kappa)).
int doubling_epochs(double underline_kappa);

/// (1 - gamma) f / |S|; rejects f <= 0.
double kappa_preset_with_frequency(double gamma, double f, int n_states);

/// 6 eps / (1 - gamma) (log2(8 k |S| / delta))^2.
double certified_gap_bound(double epsilon, double gamma, double k, int n_states, double delta);

ParamfreeResult paramfree_run(SampleStream& stream, const FeatureMap& fmap,
                              const ParamfreeConfig& config, const TabularMdp* oracle = nullptr);

}  // namespace autoexplore
