#pragma once

#include <json.hpp>

#include <string>

#include "autoexplore/mdp.hpp"

namespace autoexplore {

/// {n_states, n_actions, gamma, transition: [s][a][s'], cost: [s][a]}.
nlohmann::json mdp_to_json(const TabularMdp& mdp);
/// Throws std::invalid_argument naming the offending field.
TabularMdp mdp_from_json(const nlohmann::json& doc);

void save_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_mdp(const std::string& path);

nlohmann::json policy_to_json(const Policy& pi);

}  // namespace autoexplore
