#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <autoexplore/certificate.hpp>
#include <autoexplore/errors.hpp>
#include <autoexplore/linear_fa.hpp>
#include <autoexplore/mdp_io.hpp>
#include <autoexplore/paramfree.hpp>
#include <autoexplore/rng.hpp>
#include <autoexplore/spmd_ctd.hpp>
#include <autoexplore/tabular.hpp>

#include "battery.hpp"

namespace autoexplore::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Outputs {
  RunRecord record;
  json result = json::object();
  json extra_file;  ///< gen writes the instance here
};

FeatureMap make_features(const AlgorithmSpec& al, const TabularMdp& mdp) {
  if (al.features == "one_hot_state") {
    return FeatureMap::one_hot_state(mdp.n_states(), mdp.n_actions());
  }
  if (al.features == "random_gaussian") {
    const int d = al.feature_dim > 0 ? al.feature_dim : mdp.n_pairs();
    if (d > mdp.n_pairs()) {
      throw ConfigError("config field 'algorithm.feature_dim': exceeds the number of pairs");
    }
    return FeatureMap::random_gaussian(mdp.n_pairs(), d, al.feature_seed);
  }
  return FeatureMap::identity(mdp.n_pairs());
}

void check_origin(const AlgorithmSpec& al, const TabularMdp& mdp) {
  if (al.s_or < 0 || al.s_or >= mdp.n_states()) {
    throw ConfigError("config field 'algorithm.s_or': not a state of the instance");
  }
}

double resolve_kappa(const AlgorithmSpec& al, const TabularMdp& mdp) {
  if (al.underline_kappa > 0.0) {
    return al.underline_kappa;
  }
  if (!(al.f > 0.0)) {
    throw ConfigError("config field 'algorithm.underline_kappa': required when algorithm.f is 0");
  }
  return kappa_preset_with_frequency(mdp.gamma(), al.f, mdp.n_states());
}

Outputs solve_exact(const ExperimentConfig&, const TabularMdp& mdp) {
  const OptimalSolution sol = solve_optimal(mdp);
  Outputs o{RunRecord({"state", "v_star", "action"}), json::object(), nullptr};
  json actions = json::array();
  for (int s = 0; s < mdp.n_states(); ++s) {
    int best = 0;
    sol.policy.row(s).maxCoeff(&best);
    o.record.add_row({static_cast<double>(s), sol.value[s], static_cast<double>(best)});
    actions.push_back(best);
  }
  o.result = {{"vi_iterations", sol.vi_iterations},
              {"v_star", std::vector<double>(sol.value.data(), sol.value.data() + sol.value.size())},
              {"policy", actions}};
  return o;
}

Outputs tabular_auto(const ExperimentConfig& cfg, const TabularMdp& mdp) {
  const auto& al = cfg.algorithm;
  TabularAutoConfig tc = theorem_params(mdp.gamma(), mdp.n_actions(), mdp.n_states(), al.epsilon,
                                        al.delta, al.m_h);
  tc.anytime = al.anytime;
  if (al.iterations > 0) {
    tc.k = al.iterations;
  }
  SampleStream stream(mdp, cfg.seed, 0, al.budget);
  TabularRunResult run = run_tabular_autoexplore(stream, tc, &mdp);
  Outputs o{std::move(run.record), json::object(), nullptr};
  o.result = o.record.summary();
  o.result["stream_samples"] = stream.samples();
  o.result["k"] = tc.k;
  o.result["p"] = tc.p;
  o.result["alpha"] = tc.alpha;
  o.result["policy"] = policy_to_json(run.policy);
  return o;
}

Outputs ctd_eval(const ExperimentConfig& cfg, const TabularMdp& mdp) {
  const auto& al = cfg.algorithm;
  check_origin(al, mdp);
  const Policy pi = Policy::uniform(mdp.n_states(), mdp.n_actions());
  const FeatureMap fmap = make_features(al, mdp);
  const StateDistribution kappa = mixed_visitation(mdp, pi, al.s_or, al.f);
  const double eps_action =
      al.eps_action > 0.0 ? al.eps_action : (1.0 - mdp.gamma()) * kappa.minCoeff() / 4.0;
  const WeightModel wm = build_weights(mdp, pi, fmap, al.s_or, al.f, eps_action);
  const ProjectedBellmanSolution target = solve_projected_bellman(mdp, pi, fmap, wm);

  CtdConfig c;
  c.N = al.ctd_n;
  c.iota = al.iota > 0.0 ? al.iota : CtdConfig::iota_cap(mdp.gamma(), fmap.omega());
  c.m = al.m > 0 ? al.m : CtdConfig::mixing_floor(mdp.gamma(), fmap.omega(), mdp.n_states(), wm.mu);
  c.s_or = al.s_or;
  c.f = al.f;
  c.eps_state = al.eps_state;
  c.eps_action = eps_action;

  SampleStream stream(mdp, cfg.seed, 0, al.budget);
  Outputs o{RunRecord({"iter", "samples_cum", "w_error", "linf_error", "linf_norm"}),
            json::object(), nullptr};
  std::vector<Eigen::VectorXd> candidates;
  for (int r = 0; r < al.ctd_runs; ++r) {
    CtdResult res = ctd_run(stream, pi, fmap, c);
    const Eigen::VectorXd diff = res.q_hat - target.q;
    o.record.add_row({static_cast<double>(r + 1), static_cast<double>(stream.samples()),
                      weighted_norm(diff, wm.w), diff.cwiseAbs().maxCoeff(),
                      res.q_hat.cwiseAbs().maxCoeff()});
    candidates.push_back(std::move(res.q_hat));
  }
  const std::size_t pick = robust_min_norm(candidates);
  o.result = {{"N", c.N},
              {"iota", c.iota},
              {"m", c.m},
              {"eps_action", eps_action},
              {"mu", wm.mu},
              {"min_norm_run", pick + 1},
              {"w_error", o.record.at(pick, "w_error")},
              {"total_samples", stream.samples()}};
  return o;
}

Outputs spmd_ctd(const ExperimentConfig& cfg, const TabularMdp& mdp) {
  const auto& al = cfg.algorithm;
  check_origin(al, mdp);
  const FeatureMap fmap = make_features(al, mdp);
  SpmdCtdConfig sc = synth_params(mdp.gamma(), fmap, mdp.n_actions(), mdp.n_states(), al.epsilon,
                                  al.delta, resolve_kappa(al, mdp), al.desk);
  if (al.iterations > 0) {
    sc.k = al.iterations;
  }
  if (al.state_exploration) {
    sc.f = al.f;
  } else {
    sc.f = 0.0;
    sc.eps_state = 0.0;
  }
  SampleStream stream(mdp, cfg.seed, al.s_or, al.budget);
  const int s_or = al.s_or;
  SpmdCtdResult run =
      spmd_ctd_run(stream, fmap, sc, [s_or](std::int64_t, int) { return s_or; }, &mdp);
  Outputs o{std::move(run.record), json::object(), nullptr};
  o.result = {{"k", sc.k},         {"T", sc.T},
              {"N", sc.N},         {"m", sc.m},
              {"replicates", sc.replicates},
              {"eta", sc.eta},     {"iota", sc.iota},
              {"total_samples", run.total_samples},
              {"final_gap_linf", o.record.empty() ? 0.0 : o.record.last("gap_linf")},
              {"policy", policy_to_json(run.policy)}};
  return o;
}

Outputs paramfree(const ExperimentConfig& cfg, const TabularMdp& mdp) {
  const auto& al = cfg.algorithm;
  const FeatureMap fmap = make_features(al, mdp);
  ParamfreeConfig pc;
  pc.epsilon = al.epsilon;
  pc.delta = al.delta;
  pc.f = al.state_exploration ? al.f : 0.0;
  pc.state_exploration = al.state_exploration;
  pc.underline_kappa = resolve_kappa(al, mdp);
  pc.desk = al.desk;
  SampleStream stream(mdp, cfg.seed, 0, al.budget);
  ParamfreeResult run = paramfree_run(stream, fmap, pc, &mdp);
  Outputs o{run.record, run.summary(), nullptr};
  json epochs = json::array();
  for (const auto& e : run.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"kappa_tilde", e.kappa_tilde},
                      {"certified", e.certified},
                      {"k", e.k},
                      {"ctd_samples", e.ctd_samples},
                      {"certificate_samples", e.certificate_samples},
                      {"gap_estimate", e.gap_estimate},
                      {"threshold", e.threshold},
                      {"gap_oracle", e.gap_oracle}});
  }
  o.result["epochs"] = std::move(epochs);
  o.result["certified_gap_bound"] =
      certified_gap_bound(pc.epsilon, mdp.gamma(), static_cast<double>(run.k), mdp.n_states(),
                          pc.delta);
  o.result["policy"] = policy_to_json(run.policy);
  return o;
}

Outputs gen(const ExperimentConfig&, const TabularMdp& mdp) {
  Outputs o{RunRecord({"state", "action", "cost"}), json::object(), mdp_to_json(mdp)};
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      o.record.add_row({static_cast<double>(s), static_cast<double>(a), mdp.cost(s, a)});
    }
  }
  const Eigen::MatrixXd uniform_kernel =
      policy_kernel(mdp, Policy::uniform(mdp.n_states(), mdp.n_actions()));
  o.result = {{"n_states", mdp.n_states()},
              {"n_actions", mdp.n_actions()},
              {"gamma", mdp.gamma()},
              {"irreducible_under_uniform", is_irreducible(uniform_kernel)}};
  return o;
}

Outputs verify(const ExperimentConfig&, std::ostream& out) {
  const std::vector<CheckResult> results = run_battery();
  Outputs o{RunRecord({"criterion", "passed"}), json::object(), nullptr};
  json checks = json::array();
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS" : "FAIL") << " " << r.id << " " << r.name << ": " << r.detail << "\n";
    o.record.add_row({static_cast<double>(r.id), r.passed ? 1.0 : 0.0});
    checks.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    all = all && r.passed;
  }
  o.result = {{"all_passed", all}, {"checks", std::move(checks)}};
  return o;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw ConfigError("cannot write output file '" + path.string() + "'");
  }
  file << text;
}

/// One replicate; returns the exit code and appends messages to the buffers.
int run_single(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const std::string hash = cfg.hash_hex();
    Outputs o;
    if (cfg.command == "verify") {
      o = verify(cfg, out);
    } else {
      const TabularMdp mdp = build_instance(cfg.instance);
      if (cfg.command == "solve-exact") {
        o = solve_exact(cfg, mdp);
      } else if (cfg.command == "tabular-auto") {
        o = tabular_auto(cfg, mdp);
      } else if (cfg.command == "ctd-eval") {
        o = ctd_eval(cfg, mdp);
      } else if (cfg.command == "spmd-ctd") {
        o = spmd_ctd(cfg, mdp);
      } else if (cfg.command == "paramfree") {
        o = paramfree(cfg, mdp);
      } else {
        o = gen(cfg, mdp);
      }
    }

    const fs::path dir(cfg.output.dir);
    fs::create_directories(dir);
    const std::string stem = cfg.prefix();

    std::ostringstream csv;
    o.record.write_csv(csv, {"command=" + cfg.command, "config_hash=" + hash,
                             "seed=" + std::to_string(cfg.seed)});
    write_text(dir / (stem + ".csv"), csv.str());

    json config_doc = cfg.to_json();
    config_doc.erase("output");
    const json summary = {{"command", cfg.command},
                          {"config_hash", hash},
                          {"seed", cfg.seed},
                          {"config", std::move(config_doc)},
                          {"result", o.result}};
    write_text(dir / (stem + ".json"), summary.dump(2) + "\n");
    if (!o.extra_file.is_null()) {
      o.extra_file["config_hash"] = hash;
      o.extra_file["seed"] = cfg.seed;
      write_text(dir / (stem + ".mdp.json"), o.extra_file.dump(2) + "\n");
    }
    out << stem << ": " << o.result.dump() << "\n";
    if (cfg.command == "verify" && !o.result.at("all_passed").get<bool>()) {
      return kExitInputError;
    }
    return kExitOk;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t seed, int replicate, int replicates) {
  return replicates == 1 ? seed : derive_seed(seed, static_cast<std::uint64_t>(replicate));
}

int run_command(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  const int n = config.replicates;
  if (n == 1) {
    return run_single(config, out, err);
  }
  std::vector<ExperimentConfig> configs(static_cast<std::size_t>(n), config);
  for (int r = 0; r < n; ++r) {
    auto& c = configs[static_cast<std::size_t>(r)];
    c.replicates = 1;
    c.seed = replicate_seed(config.seed, r, n);
    c.output.prefix = config.prefix() + "_r" + std::to_string(r);
  }
  std::vector<std::ostringstream> outs(static_cast<std::size_t>(n));
  std::vector<std::ostringstream> errs(static_cast<std::size_t>(n));
  std::vector<int> codes(static_cast<std::size_t>(n), kExitOk);
  std::atomic<int> next{0};
  const unsigned workers =
      std::max(1u, std::min(static_cast<unsigned>(n), std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next++; r < n; r = next++) {
          const auto i = static_cast<std::size_t>(r);
          codes[i] = run_single(configs[i], outs[i], errs[i]);
        }
      });
    }
  }
  int code = kExitOk;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    out << outs[i].str();
    err << errs[i].str();
    // A budget failure outranks input errors in the aggregate code.
    if (codes[i] == kExitBudget || (codes[i] != kExitOk && code == kExitOk)) {
      code = codes[i];
    }
  }
  return code;
}

}  // namespace autoexplore::cli
