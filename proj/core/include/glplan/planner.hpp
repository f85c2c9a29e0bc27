#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glplan/geometry.hpp"
#include "glplan/sampling.hpp"
#include "glplan/workspace.hpp"

namespace glplan {

enum class PlannerKind { kRrt, kBirrt, kPrm };

PlannerKind planner_kind_from_string(const std::string& name);
std::string to_string(PlannerKind kind);

struct PlannerConfig {
  PlannerKind kind = PlannerKind::kBirrt;
  double lambda = kDefaultLambda;  // applied when the caller builds the sampler
  double timeout_s = 30.0;
  double rrt_step = 0.3;        // steer distance, C-space max-norm, radians
  double rrt_goal_bias = 0.05;  // tree planners only; replaces the lambda branch
  int prm_batch = 100;
  int prm_k_neighbors = 10;
  double motion_step = kDefaultMotionStep;
  std::uint64_t rng_seed = 0;
};

struct Path {
  std::vector<Configuration> waypoints;  // first = start, last = goal
};

double path_length(const Path& path, const std::vector<JointLimits>& limits);

/// Planning is metered by a deterministic work model (collision primitives
/// checked), so timeouts, iteration counts, and results depend only on the
/// seed and inputs, never on machine load. One work unit is one
/// segment-against-primitive test; the conversion constant below was
/// calibrated so a model second tracks a wall second on a desktop core.
inline constexpr double kWorkUnitsPerSecond = 4.0e7;

/// Collision interface handed to the planners: validity plus work metering.
class ValidityChecker {
 public:
  ValidityChecker(const ChainSpec& chain, std::vector<Circle> obstacles,
                  double motion_step = kDefaultMotionStep);

  bool valid(const Configuration& q);
  bool motion(const Configuration& a, const Configuration& b);

  /// Meters non-collision planner work (nearest-neighbor distance scans), one
  /// unit per C-space distance evaluation, so model time keeps tracking wall
  /// time as trees and roadmaps grow.
  void charge(std::uint64_t units) { units_ += units; }

  std::uint64_t work_units() const { return units_; }
  double elapsed_model_s() const { return static_cast<double>(units_) / kWorkUnitsPerSecond; }
  const ChainSpec& chain() const { return chain_; }
  const std::vector<Circle>& obstacles() const { return obstacles_; }
  double motion_step() const { return motion_step_; }

 private:
  ChainSpec chain_;
  std::vector<Circle> obstacles_;
  double motion_step_;
  std::uint64_t units_ = 0;
  std::uint64_t units_per_config_;
};

struct PlanResult {
  enum class Outcome { kSolved, kTimeout };

  Outcome outcome = Outcome::kTimeout;
  std::optional<Path> path;  // present iff solved
  double elapsed_s = 0.0;    // deterministic model time used against the timeout
  double wall_s = 0.0;       // measured wall clock, informational
  std::uint64_t iterations = 0;
  std::uint64_t valid_sample_count = 0;   // vertices/nodes actually added
  std::uint64_t biased_sample_count = 0;  // draws that took the synthesized branch

  bool solved() const { return outcome == Outcome::kSolved; }
};

/// RRT tree; nodes store parent indices into the same vector.
struct Tree {
  struct Node {
    Configuration q;
    int parent = -1;
  };
  std::vector<Node> nodes;

  /// Index of the node nearest to q by wrapped max-norm; ties to the lowest
  /// index. Tree must be non-empty.
  int nearest(const Configuration& q, const std::vector<JointLimits>& limits) const;

  /// Waypoints from the root to the given node.
  std::vector<Configuration> branch_to_root(int node) const;
};

enum class ExtendResult { kTrapped, kAdvanced, kReached };

/// One RRT extension toward target: steer from the nearest node by at most
/// step, add the new node iff the straight motion to it is valid. Returns
/// kReached when the target itself was added (or already present).
ExtendResult rrt_extend(Tree& tree, const Configuration& target, double step,
                        ValidityChecker& checker);

/// Undirected roadmap with incremental connectivity tracking.
struct Roadmap {
  struct Edge {
    int to;
    double length;
  };
  std::vector<Configuration> vertices;
  std::vector<std::vector<Edge>> adjacency;

  int add_vertex(const Configuration& q);
  void add_edge(int a, int b, double length);
  bool same_component(int a, int b) const;

 private:
  mutable std::vector<int> parent_;  // union-find
  int find(int v) const;
};

/// Adds each valid sample as a vertex and attempts edges to its k nearest
/// existing vertices; an edge is kept iff the motion is valid. Invalid
/// samples are discarded and counted in *discarded when given.
void prm_grow(Roadmap& roadmap, const std::vector<Configuration>& batch, int k,
              ValidityChecker& checker, std::uint64_t* discarded = nullptr);

/// Shortest path between two roadmap vertices by summed max-norm edge length.
/// Throws std::runtime_error when they are not connected.
Path extract_path(const Roadmap& roadmap, int start_vertex, int goal_vertex,
                  const std::vector<JointLimits>& limits);

/// Runs the configured planner with lambda-mixed sampling. Throws
/// std::invalid_argument when start or goal is out of limits or in collision.
PlanResult plan(const World& world, const Configuration& start, const Configuration& goal,
                const GlSampler& sampler, const PlannerConfig& cfg);

}  // namespace glplan
