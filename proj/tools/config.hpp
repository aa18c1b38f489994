#pragma once

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <autoexplore/mdp.hpp>
#include <autoexplore/spmd_ctd.hpp>

namespace autoexplore::cli {

/// Malformed or inconsistent configuration. The message names the field.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

struct InstanceSpec {
  std::string generator = "garnet";  ///< garnet | hard_chain | file
  int n_states = 5;
  int n_actions = 3;
  int branching = 3;
  std::uint64_t seed = 0;
  double gamma = 0.8;
  double slip = 0.2;
  std::string path;  ///< for generator == "file"
};

struct AlgorithmSpec {
  double epsilon = 0.1;
  double delta = 0.1;
  double m_h = 0.0;
  std::int64_t iterations = 0;  ///< 0 keeps the formula value
  bool anytime = true;

  std::string features = "identity";  ///< identity | one_hot_state | random_gaussian
  int feature_dim = 0;
  std::uint64_t feature_seed = 0;

  int s_or = 0;
  double f = 0.5;
  double underline_kappa = 0.0;  ///< 0 picks (1 - gamma) f / |S|
  bool state_exploration = true;

  // ctd-eval; zeros pick the defaults documented in the README.
  std::int64_t ctd_n = 1000;
  double iota = 0.0;
  std::int64_t m = 0;
  double eps_state = 0.1;
  double eps_action = 0.0;
  int ctd_runs = 1;

  DeskScale desk;
  std::int64_t budget = 100'000'000;
};

struct OutputSpec {
  std::string dir = ".";
  std::string prefix;  ///< defaults to the command name
};

struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 0;
  int replicates = 1;
  InstanceSpec instance;
  AlgorithmSpec algorithm;
  OutputSpec output;

  nlohmann::json to_json() const;
  /// Unknown keys and wrong types throw ConfigError naming the field path.
  static ExperimentConfig from_json(const nlohmann::json& doc);

  /// FNV-1a over the canonical dump, output section excluded.
  std::uint64_t hash() const;
  std::string hash_hex() const;
  std::string prefix() const { return output.prefix.empty() ? command : output.prefix; }
};

const std::vector<std::string>& known_commands();

std::uint64_t fnv1a64(const std::string& bytes) noexcept;

/// Parse JSON text; syntax errors become ConfigError with line and column.
nlohmann::json parse_config_text(const std::string& text, const std::string& origin);
nlohmann::json read_config_file(const std::string& path);

/// Recursive object merge, `overlay` wins.
void merge_into(nlohmann::json& base, const nlohmann::json& overlay);

/// Instance from the spec; `file` accepts a bare MDP document or a `gen` output.
TabularMdp build_instance(const InstanceSpec& spec);

}  // namespace autoexplore::cli
