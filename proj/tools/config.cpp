#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <autoexplore/generators.hpp>
#include <autoexplore/mdp_io.hpp>

namespace autoexplore::cli {

namespace {

using nlohmann::json;

/// Typed access to one JSON object with path-qualified errors.
class Fields {
 public:
  Fields(const json& doc, std::string path, std::set<std::string> allowed)
      : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) {
      throw ConfigError("config field '" + display() + "': expected an object");
    }
    for (const auto& [key, value] : doc_.items()) {
      if (!allowed.contains(key)) {
        throw ConfigError("config field '" + qualified(key) + "': unknown key");
      }
    }
  }

  template <typename T>
  void read(const char* key, T& out) const {
    if (!doc_.contains(key)) {
      return;
    }
    const json& value = doc_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!value.is_boolean()) fail(key, "expected true or false");
      out = value.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!value.is_string()) fail(key, "expected a string");
      out = value.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!value.is_number()) fail(key, "expected a number");
      out = value.get<double>();
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!value.is_number_unsigned()) fail(key, "expected a non-negative integer");
      out = value.get<T>();
    } else {
      if (!value.is_number_integer()) fail(key, "expected an integer");
      out = value.get<T>();
    }
  }

  const json* child(const char* key) const { return doc_.contains(key) ? &doc_.at(key) : nullptr; }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ConfigError("config field '" + qualified(key) + "': " + why);
  }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  const json& doc_;
  std::string path_;
};

void check(bool ok, const std::string& field, const std::string& why) {
  if (!ok) {
    throw ConfigError("config field '" + field + "': " + why);
  }
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> commands{"solve-exact", "tabular-auto", "ctd-eval",
                                                 "spmd-ctd",    "paramfree",    "verify",
                                                 "gen"};
  return commands;
}

json ExperimentConfig::to_json() const {
  const auto& d = algorithm.desk;
  return {
      {"command", command},
      {"seed", seed},
      {"replicates", replicates},
      {"instance",
       {{"generator", instance.generator},
        {"n_states", instance.n_states},
        {"n_actions", instance.n_actions},
        {"branching", instance.branching},
        {"seed", instance.seed},
        {"gamma", instance.gamma},
        {"slip", instance.slip},
        {"path", instance.path}}},
      {"algorithm",
       {{"epsilon", algorithm.epsilon},
        {"delta", algorithm.delta},
        {"m_h", algorithm.m_h},
        {"iterations", algorithm.iterations},
        {"anytime", algorithm.anytime},
        {"features", algorithm.features},
        {"feature_dim", algorithm.feature_dim},
        {"feature_seed", algorithm.feature_seed},
        {"s_or", algorithm.s_or},
        {"f", algorithm.f},
        {"underline_kappa", algorithm.underline_kappa},
        {"state_exploration", algorithm.state_exploration},
        {"ctd_n", algorithm.ctd_n},
        {"iota", algorithm.iota},
        {"m", algorithm.m},
        {"eps_state", algorithm.eps_state},
        {"eps_action", algorithm.eps_action},
        {"ctd_runs", algorithm.ctd_runs},
        {"budget", algorithm.budget},
        {"desk",
         {{"k_div", d.k_div},
          {"t_div", d.t_div},
          {"n_div", d.n_div},
          {"m_div", d.m_div},
          {"cert_div", d.cert_div}}}}},
      {"output", {{"dir", output.dir}, {"prefix", output.prefix}}},
  };
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  ExperimentConfig cfg;
  const Fields root(doc, "", {"command", "seed", "replicates", "instance", "algorithm", "output"});
  root.read("command", cfg.command);
  root.read("seed", cfg.seed);
  root.read("replicates", cfg.replicates);

  if (const json* node = root.child("instance")) {
    const Fields f(*node, "instance",
                   {"generator", "n_states", "n_actions", "branching", "seed", "gamma", "slip",
                    "path"});
    auto& in = cfg.instance;
    f.read("generator", in.generator);
    f.read("n_states", in.n_states);
    f.read("n_actions", in.n_actions);
    f.read("branching", in.branching);
    f.read("seed", in.seed);
    f.read("gamma", in.gamma);
    f.read("slip", in.slip);
    f.read("path", in.path);
  }
  if (const json* node = root.child("algorithm")) {
    const Fields f(*node, "algorithm",
                   {"epsilon", "delta", "m_h", "iterations", "anytime", "features", "feature_dim",
                    "feature_seed", "s_or", "f", "underline_kappa", "state_exploration", "ctd_n",
                    "iota", "m", "eps_state", "eps_action", "ctd_runs", "budget", "desk"});
    auto& al = cfg.algorithm;
    f.read("epsilon", al.epsilon);
    f.read("delta", al.delta);
    f.read("m_h", al.m_h);
    f.read("iterations", al.iterations);
    f.read("anytime", al.anytime);
    f.read("features", al.features);
    f.read("feature_dim", al.feature_dim);
    f.read("feature_seed", al.feature_seed);
    f.read("s_or", al.s_or);
    f.read("f", al.f);
    f.read("underline_kappa", al.underline_kappa);
    f.read("state_exploration", al.state_exploration);
    f.read("ctd_n", al.ctd_n);
    f.read("iota", al.iota);
    f.read("m", al.m);
    f.read("eps_state", al.eps_state);
    f.read("eps_action", al.eps_action);
    f.read("ctd_runs", al.ctd_runs);
    f.read("budget", al.budget);
    if (const json* desk = f.child("desk")) {
      const Fields dk(*desk, "algorithm.desk", {"k_div", "t_div", "n_div", "m_div", "cert_div"});
      dk.read("k_div", al.desk.k_div);
      dk.read("t_div", al.desk.t_div);
      dk.read("n_div", al.desk.n_div);
      dk.read("m_div", al.desk.m_div);
      dk.read("cert_div", al.desk.cert_div);
    }
  }
  if (const json* node = root.child("output")) {
    const Fields f(*node, "output", {"dir", "prefix"});
    f.read("dir", cfg.output.dir);
    f.read("prefix", cfg.output.prefix);
  }

  const auto& commands = known_commands();
  check(std::find(commands.begin(), commands.end(), cfg.command) != commands.end(), "command",
        cfg.command.empty() ? "missing" : "unknown command '" + cfg.command + "'");
  check(cfg.replicates >= 1, "replicates", "must be at least 1");

  const auto& in = cfg.instance;
  check(in.generator == "garnet" || in.generator == "hard_chain" || in.generator == "file",
        "instance.generator", "expected garnet, hard_chain or file");
  check(in.gamma >= 0.0 && in.gamma < 1.0, "instance.gamma", "must lie in [0, 1)");
  if (in.generator == "file") {
    check(!in.path.empty(), "instance.path", "required when generator is file");
  } else {
    check(in.n_states >= 1 && in.n_states <= 20, "instance.n_states", "must lie in [1, 20]");
  }
  if (in.generator == "garnet") {
    check(in.n_actions >= 1 && in.n_actions <= 5, "instance.n_actions", "must lie in [1, 5]");
    check(in.branching >= 1 && in.branching <= in.n_states, "instance.branching",
          "must lie in [1, n_states]");
  }
  if (in.generator == "hard_chain") {
    check(in.slip >= 0.0 && in.slip < 1.0, "instance.slip", "must lie in [0, 1)");
  }

  const auto& al = cfg.algorithm;
  check(al.epsilon > 0.0, "algorithm.epsilon", "must be positive");
  check(al.delta > 0.0 && al.delta < 1.0, "algorithm.delta", "must lie in (0, 1)");
  check(al.iterations >= 0, "algorithm.iterations", "must be non-negative");
  check(al.features == "identity" || al.features == "one_hot_state" ||
            al.features == "random_gaussian",
        "algorithm.features", "expected identity, one_hot_state or random_gaussian");
  check(al.f >= 0.0 && al.f <= 1.0, "algorithm.f", "must lie in [0, 1]");
  check(al.underline_kappa >= 0.0 && al.underline_kappa <= 1.0, "algorithm.underline_kappa",
        "must lie in [0, 1]");
  check(al.ctd_n >= 0, "algorithm.ctd_n", "must be non-negative");
  check(al.iota >= 0.0, "algorithm.iota", "must be non-negative");
  check(al.m >= 0, "algorithm.m", "must be non-negative");
  check(al.eps_state >= 0.0 && al.eps_state <= 1.0, "algorithm.eps_state", "must lie in [0, 1]");
  check(al.eps_action >= 0.0 && al.eps_action <= 1.0, "algorithm.eps_action",
        "must lie in [0, 1]");
  check(al.ctd_runs >= 1, "algorithm.ctd_runs", "must be at least 1");
  check(al.budget >= 1, "algorithm.budget", "must be positive");
  for (const auto& [name, value] : {std::pair{"k_div", al.desk.k_div}, {"t_div", al.desk.t_div},
                                    {"n_div", al.desk.n_div}, {"m_div", al.desk.m_div},
                                    {"cert_div", al.desk.cert_div}}) {
    check(value >= 1.0, std::string("algorithm.desk.") + name, "must be at least 1");
  }
  return cfg;
}

std::uint64_t fnv1a64(const std::string& bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t ExperimentConfig::hash() const {
  json doc = to_json();
  doc.erase("output");
  return fnv1a64(doc.dump());
}

std::string ExperimentConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

json parse_config_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into a line and column.
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": malformed JSON");
  }
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

void merge_into(json& base, const json& overlay) {
  if (!base.is_object() || !overlay.is_object()) {
    base = overlay;
    return;
  }
  for (const auto& [key, value] : overlay.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object()) {
      merge_into(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

TabularMdp build_instance(const InstanceSpec& spec) {
  if (spec.generator == "garnet") {
    return gen_garnet(spec.n_states, spec.n_actions, spec.branching, spec.seed, spec.gamma);
  }
  if (spec.generator == "hard_chain") {
    return gen_hard_chain(spec.n_states, spec.slip, spec.gamma);
  }
  return load_mdp(spec.path);
}

}  // namespace autoexplore::cli
