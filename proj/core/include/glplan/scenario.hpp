#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "glplan/geometry.hpp"
#include "glplan/planner.hpp"
#include "glplan/workspace.hpp"

namespace glplan {

/// Raised on malformed or inconsistent scenario/path files.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One planning problem: a world plus a validated start/goal query.
struct Scenario {
  std::string name;
  ChainSpec chain;
  std::vector<Circle> obstacles;
  Configuration start;
  Configuration goal;
  double gap_threshold = kDefaultGapThreshold;

  World world() const { return {chain, obstacles}; }
};

/// Loads and validates a scenario; start/goal in collision are rejected with
/// the offending link and obstacle named.
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

void save_path_file(const Path& path, const std::string& file);
Path load_path_file(const std::string& file);

/// Configuration sets share the path file format (a waypoint list).
std::vector<Configuration> load_config_set(const std::string& file);

}  // namespace glplan
