#pragma once

#include <string>
#include <vector>

#include "glplan/planner.hpp"
#include "glplan/scenario.hpp"

namespace glplan {

/// Renders the scenario to a standalone SVG document: obstacles, the chain at
/// the start (blue) and goal (red), an optional path sweep, and an optional
/// end-effector scatter of sampled configurations. Output is deterministic
/// for identical inputs.
std::string render_scenario_svg(const Scenario& scenario, const Path* path = nullptr,
                                const std::vector<Configuration>* samples = nullptr);

void write_svg(const std::string& svg, const std::string& file);

}  // namespace glplan
