#include "glplan/scenario.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace glplan {

using nlohmann::json;

namespace {

json chain_to_json(const ChainSpec& chain) {
  json limits = json::array();
  for (const JointLimits& l : chain.joint_limits) limits.push_back({l.lo, l.hi});
  return json{{"base", {chain.base_x, chain.base_y}},
              {"link_lengths", chain.link_lengths},
              {"joint_limits", std::move(limits)},
              {"self_collision", chain.self_collision_enabled}};
}

ChainSpec chain_from_json(const json& j, const std::string& context) {
  ChainSpec chain;
  const auto base = j.at("base").get<std::vector<double>>();
  if (base.size() != 2) throw ScenarioError(context + ": chain base must be [x, y]");
  chain.base_x = base[0];
  chain.base_y = base[1];
  chain.link_lengths = j.at("link_lengths").get<std::vector<double>>();
  if (chain.link_lengths.empty()) throw ScenarioError(context + ": chain needs links");
  for (std::size_t i = 0; i < chain.link_lengths.size(); ++i) {
    if (chain.link_lengths[i] <= 0.0) {
      throw ScenarioError(context + ": link " + std::to_string(i) + " has non-positive length");
    }
  }
  if (j.contains("joint_limits")) {
    for (const auto& pair : j.at("joint_limits")) {
      const auto v = pair.get<std::vector<double>>();
      if (v.size() != 2 || v[0] > v[1]) {
        throw ScenarioError(context + ": joint limits must be [lo, hi] with lo <= hi");
      }
      chain.joint_limits.push_back({v[0], v[1]});
    }
    if (chain.joint_limits.size() != chain.link_lengths.size()) {
      throw ScenarioError(context + ": joint_limits count differs from link count");
    }
  } else {
    chain.joint_limits.assign(chain.link_lengths.size(), JointLimits{});
  }
  chain.self_collision_enabled = j.value("self_collision", true);
  return chain;
}

Configuration config_from_json(const json& j, std::size_t dof, const std::string& what,
                               const std::string& context) {
  const auto angles = j.get<std::vector<double>>();
  if (angles.size() != dof) {
    throw ScenarioError(context + ": " + what + " has " + std::to_string(angles.size()) +
                        " angles, chain has " + std::to_string(dof));
  }
  return Configuration(angles);
}

json load_json(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(what + ": cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ScenarioError(what + ": " + path + ": " + e.what());
  }
  return doc;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  const json doc = load_json(path, "load_scenario");
  if (doc.value("format_version", 0) != 1) {
    throw ScenarioError("load_scenario: " + path + ": unsupported format_version");
  }
  Scenario s;
  try {
    s.name = doc.value("name", path);
    s.chain = chain_from_json(doc.at("chain"), path);
    for (const auto& o : doc.value("obstacles", json::array())) {
      const Circle c{o.at("cx").get<double>(), o.at("cy").get<double>(), o.at("r").get<double>()};
      if (c.r <= 0.0) {
        throw ScenarioError(path + ": obstacle " + std::to_string(s.obstacles.size()) +
                            " has non-positive radius");
      }
      s.obstacles.push_back(c);
    }
    s.start = config_from_json(doc.at("start"), s.chain.dof(), "start", path);
    s.goal = config_from_json(doc.at("goal"), s.chain.dof(), "goal", path);
    s.gap_threshold = doc.value("gap_threshold", kDefaultGapThreshold);
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError("load_scenario: " + path + ": " + e.what());
  }

  const auto check = [&](const Configuration& q, const std::string& which) {
    if (!within_limits(q, s.chain.joint_limits)) {
      throw ScenarioError(path + ": " + which + " configuration violates joint limits");
    }
    if (auto hit = find_collision(s.chain, q, s.obstacles)) {
      throw ScenarioError(path + ": " + which + " configuration invalid: " + hit->describe());
    }
  };
  check(s.start, "start");
  check(s.goal, "goal");
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  json obstacles = json::array();
  for (const Circle& c : s.obstacles) {
    obstacles.push_back({{"cx", c.cx}, {"cy", c.cy}, {"r", c.r}});
  }
  const json doc{{"format_version", 1},     {"name", s.name},
                 {"chain", chain_to_json(s.chain)}, {"obstacles", std::move(obstacles)},
                 {"start", s.start.angles}, {"goal", s.goal.angles},
                 {"gap_threshold", s.gap_threshold}};
  std::ofstream out(path);
  if (!out) throw ScenarioError("save_scenario: cannot write " + path);
  out << doc.dump(2) << '\n';
}

void save_path_file(const Path& path, const std::string& file) {
  json waypoints = json::array();
  for (const Configuration& q : path.waypoints) waypoints.push_back(q.angles);
  const json doc{{"format_version", 1}, {"waypoints", std::move(waypoints)}};
  std::ofstream out(file);
  if (!out) throw ScenarioError("save_path_file: cannot write " + file);
  out << doc.dump(2) << '\n';
}

Path load_path_file(const std::string& file) {
  const json doc = load_json(file, "load_path_file");
  Path path;
  for (const auto& w : doc.at("waypoints")) {
    path.waypoints.emplace_back(w.get<std::vector<double>>());
  }
  if (path.waypoints.size() < 2) {
    throw ScenarioError("load_path_file: " + file + ": a path needs at least 2 waypoints");
  }
  return path;
}

std::vector<Configuration> load_config_set(const std::string& file) {
  const json doc = load_json(file, "load_config_set");
  const json& list = doc.contains("configurations") ? doc.at("configurations") : doc.at("waypoints");
  std::vector<Configuration> configs;
  for (const auto& w : list) configs.emplace_back(w.get<std::vector<double>>());
  return configs;
}

}  // namespace glplan
