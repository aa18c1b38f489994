#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <vector>

#include "commands.hpp"
#include "config.hpp"

namespace {

using nlohmann::json;
using Applier = std::function<void(json&)>;

template <typename T>
void add_field(CLI::App& app, std::vector<Applier>& appliers, const std::string& flag,
          const std::string& pointer, const std::string& help) {
  auto value = std::make_shared<std::optional<T>>();
  app.add_option(flag, *value, help);
  appliers.push_back([value, pointer](json& doc) {
    if (value->has_value()) {
      doc[json::json_pointer(pointer)] = **value;
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  using namespace autoexplore::cli;

  CLI::App app{"Auto-exploring policy optimization experiments"};
  std::string command;
  std::string config_path;
  app.add_option("command", command, "solve-exact | tabular-auto | ctd-eval | spmd-ctd | paramfree | verify | gen")
      ->required();
  app.add_option("-c,--config", config_path, "JSON config file; flags override its fields");

  std::vector<Applier> appliers;
  add_field<std::uint64_t>(app, appliers, "--seed", "/seed", "stream seed");
  add_field<int>(app, appliers, "--replicates", "/replicates", "independent seeded runs on worker threads");

  add_field<std::string>(app, appliers, "--generator", "/instance/generator", "garnet | hard_chain | file");
  add_field<int>(app, appliers, "--n-states", "/instance/n_states", "");
  add_field<int>(app, appliers, "--n-actions", "/instance/n_actions", "");
  add_field<int>(app, appliers, "--branching", "/instance/branching", "garnet successors per pair");
  add_field<std::uint64_t>(app, appliers, "--instance-seed", "/instance/seed", "generator seed");
  add_field<double>(app, appliers, "--gamma", "/instance/gamma", "discount factor");
  add_field<double>(app, appliers, "--slip", "/instance/slip", "hard chain slip probability");
  add_field<std::string>(app, appliers, "--instance-file", "/instance/path", "MDP JSON for generator=file");

  add_field<double>(app, appliers, "--epsilon", "/algorithm/epsilon", "");
  add_field<double>(app, appliers, "--delta", "/algorithm/delta", "");
  add_field<double>(app, appliers, "--m-h", "/algorithm/m_h", "regularizer subgradient bound");
  add_field<std::int64_t>(app, appliers, "--iterations", "/algorithm/iterations", "override k (0 keeps the formula)");
  add_field<bool>(app, appliers, "--anytime", "/algorithm/anytime", "true | false");
  add_field<std::string>(app, appliers, "--features", "/algorithm/features", "identity | one_hot_state | random_gaussian");
  add_field<int>(app, appliers, "--feature-dim", "/algorithm/feature_dim", "");
  add_field<std::uint64_t>(app, appliers, "--feature-seed", "/algorithm/feature_seed", "");
  add_field<int>(app, appliers, "--s-or", "/algorithm/s_or", "origin state");
  add_field<double>(app, appliers, "--f", "/algorithm/f", "state exploration frequency");
  add_field<double>(app, appliers, "--kappa", "/algorithm/underline_kappa", "visitation lower bound (0 = preset)");
  add_field<bool>(app, appliers, "--state-exploration", "/algorithm/state_exploration", "true | false");
  add_field<std::int64_t>(app, appliers, "--ctd-n", "/algorithm/ctd_n", "");
  add_field<double>(app, appliers, "--iota", "/algorithm/iota", "CTD step size (0 = cap)");
  add_field<std::int64_t>(app, appliers, "--m", "/algorithm/m", "geometric truncation (0 = floor)");
  add_field<double>(app, appliers, "--eps-state", "/algorithm/eps_state", "");
  add_field<double>(app, appliers, "--eps-action", "/algorithm/eps_action", "");
  add_field<int>(app, appliers, "--ctd-runs", "/algorithm/ctd_runs", "");
  add_field<std::int64_t>(app, appliers, "--budget", "/algorithm/budget", "sample cap per stream");
  add_field<double>(app, appliers, "--k-div", "/algorithm/desk/k_div", "");
  add_field<double>(app, appliers, "--t-div", "/algorithm/desk/t_div", "");
  add_field<double>(app, appliers, "--n-div", "/algorithm/desk/n_div", "");
  add_field<double>(app, appliers, "--m-div", "/algorithm/desk/m_div", "");
  add_field<double>(app, appliers, "--cert-div", "/algorithm/desk/cert_div", "");

  add_field<std::string>(app, appliers, "-o,--out-dir", "/output/dir", "output directory");
  add_field<std::string>(app, appliers, "--prefix", "/output/prefix", "output file stem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    json doc = config_path.empty() ? json::object() : read_config_file(config_path);
    if (!doc.is_object()) {
      throw ConfigError(config_path + ": top level must be an object");
    }
    json overlay = json::object();
    for (const auto& apply : appliers) {
      apply(overlay);
    }
    merge_into(doc, overlay);
    doc["command"] = command;
    if (const char* env = std::getenv("AUTOEXPLORE_SEED")) {
      char* end = nullptr;
      const unsigned long long seed = std::strtoull(env, &end, 10);
      if (*env == '\0' || *end != '\0' || *env == '-') {
        throw ConfigError("AUTOEXPLORE_SEED: expected a non-negative integer");
      }
      doc["seed"] = static_cast<std::uint64_t>(seed);
    }
    const ExperimentConfig config = ExperimentConfig::from_json(doc);
    return run_command(config, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
