#include "autoexplore/mdp_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace autoexplore {

namespace {

using nlohmann::json;

const json& field(const json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) {
    throw std::invalid_argument(std::string("mdp json: missing field '") + name + "'");
  }
  return doc.at(name);
}

double number_at(const json& value, const std::string& where) {
  if (!value.is_number()) {
    throw std::invalid_argument("mdp json: " + where + " is not a number");
  }
  return value.get<double>();
}

void expect_array(const json& value, std::size_t size, const std::string& where) {
  if (!value.is_array() || value.size() != size) {
    throw std::invalid_argument("mdp json: " + where + " must be an array of length " +
                                std::to_string(size));
  }
}

}  // namespace

json mdp_to_json(const TabularMdp& mdp) {
  json transition = json::array();
  json cost = json::array();
  for (int s = 0; s < mdp.n_states(); ++s) {
    json per_action = json::array();
    json cost_row = json::array();
    for (int a = 0; a < mdp.n_actions(); ++a) {
      json row = json::array();
      for (int t = 0; t < mdp.n_states(); ++t) {
        row.push_back(mdp.transition(s, a, t));
      }
      per_action.push_back(std::move(row));
      cost_row.push_back(mdp.cost(s, a));
    }
    transition.push_back(std::move(per_action));
    cost.push_back(std::move(cost_row));
  }
  return {{"n_states", mdp.n_states()},
          {"n_actions", mdp.n_actions()},
          {"gamma", mdp.gamma()},
          {"transition", std::move(transition)},
          {"cost", std::move(cost)}};
}

TabularMdp mdp_from_json(const json& doc) {
  const json& ns = field(doc, "n_states");
  const json& na = field(doc, "n_actions");
  if (!ns.is_number_integer() || !na.is_number_integer()) {
    throw std::invalid_argument("mdp json: n_states and n_actions must be integers");
  }
  const int n_states = ns.get<int>();
  const int n_actions = na.get<int>();
  if (n_states <= 0 || n_actions <= 0) {
    throw std::invalid_argument("mdp json: n_states and n_actions must be positive");
  }
  const double gamma = number_at(field(doc, "gamma"), "gamma");

  const json& tr = field(doc, "transition");
  const json& co = field(doc, "cost");
  expect_array(tr, static_cast<std::size_t>(n_states), "transition");
  expect_array(co, static_cast<std::size_t>(n_states), "cost");

  Eigen::MatrixXd transition(n_states * n_actions, n_states);
  Eigen::MatrixXd cost(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    const std::string ws = "[" + std::to_string(s) + "]";
    expect_array(tr[s], static_cast<std::size_t>(n_actions), "transition" + ws);
    expect_array(co[s], static_cast<std::size_t>(n_actions), "cost" + ws);
    for (int a = 0; a < n_actions; ++a) {
      const std::string wa = ws + "[" + std::to_string(a) + "]";
      expect_array(tr[s][a], static_cast<std::size_t>(n_states), "transition" + wa);
      for (int t = 0; t < n_states; ++t) {
        transition(s * n_actions + a, t) =
            number_at(tr[s][a][t], "transition" + wa + "[" + std::to_string(t) + "]");
      }
      cost(s, a) = number_at(co[s][a], "cost" + wa);
    }
  }
  return TabularMdp(n_states, n_actions, std::move(transition), std::move(cost), gamma);
}

void save_mdp(const TabularMdp& mdp, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_mdp: cannot open " + path);
  }
  out << mdp_to_json(mdp).dump(2) << '\n';
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_mdp: cannot open " + path);
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("load_mdp: " + path + ": " + e.what());
  }
  return mdp_from_json(doc);
}

json policy_to_json(const Policy& pi) {
  json rows = json::array();
  for (int s = 0; s < pi.n_states(); ++s) {
    json row = json::array();
    for (int a = 0; a < pi.n_actions(); ++a) {
      row.push_back(pi(s, a));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace autoexplore
