#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glplan/geometry.hpp"
#include "glplan/planner.hpp"
#include "glplan/random.hpp"
#include "glplan/sampling.hpp"
#include "glplan/workspace.hpp"

namespace glplan {

/// Knobs for producing one local primitive's experience set.
struct ExperienceConfig {
  int runs_per_query = 10;        // planner repetitions per start/goal pair
  int queries_per_primitive = 5;  // start/goal pairs per primitive
  double sigma = kDefaultSigma;
  int shortcut_iterations = 100;
  double dedup_radius = 0.05;         // max-norm radians
  double gap_region_inflation = 0.5;  // meters added around the inter-circle capsule
  double clearance_radius = 0.5;      // margin outside the bounding circle
  double gen_timeout_s = 5.0;         // model-time budget per training solve
  std::uint64_t max_rejection_attempts = 100000;
  double motion_step = kDefaultMotionStep;
};

/// Start region test: some chain joint point lies in the inflated capsule
/// spanned between the two circles (the gap neighborhood).
bool touches_gap_region(const ChainPose& pose, const LocalPrimitive& lw, double inflation);

/// Goal region test: every chain joint point lies outside the primitive's
/// bounding circle grown by clearance.
bool entirely_outside(const ChainPose& pose, const LocalPrimitive& lw, double clearance);

/// Minimal circle containing both primitive disks.
Circle bounding_circle(const LocalPrimitive& lw);

/// Waypoints harvested from repeated solves of gap-traversal queries in the
/// world containing only the primitive's two circles. Empty configs with a
/// nonempty skip_reason means the primitive was skipped.
struct LocalExperience {
  std::vector<Configuration> configs;
  std::string skip_reason;
  int paths_solved = 0;

  bool skipped() const { return !skip_reason.empty(); }
};

/// Offline experience generation for one canonical-pose primitive. The chain
/// base must be at the origin (the canonical frame). Starts are
/// rejection-sampled inside the gap region, goals entirely outside; each pair
/// is solved runs_per_query times with uniform BiRRT, paths are shortcut, and
/// all waypoints are pooled and deduplicated at dedup_radius.
LocalExperience generate_local_experience(const LocalPrimitive& lw, const ChainSpec& chain,
                                          const ExperienceConfig& cfg, RandomStream& rng);

/// Random waypoint-pair shortcutting: repeatedly try to splice out the
/// stretch between two non-adjacent waypoints when the straight segment
/// between them is collision free. Never lengthens the path.
Path shortcut(const Path& path, const World& world, int iterations, RandomStream& rng,
              double motion_step = kDefaultMotionStep);

/// One merged visibility clique: a group of configurations that are pairwise
/// connectable by straight collision-free segments, summarized by a Gaussian.
struct MergedClique {
  Configuration mean;
  Eigen::MatrixXd covariance;  // dof x dof; sigma^2*I when the clique is small
  std::vector<int> members;    // indices into the input configuration list

  int member_count() const { return static_cast<int>(members.size()); }
};

/// Greedy clique cover of the visibility graph over configs (edge iff
/// motion_valid in the given world). Each round seeds with the
/// highest-degree unassigned vertex and grows by adding, in degree order,
/// vertices adjacent to every current member. Cliques of at least dof+1
/// members get a fitted covariance (+1e-6*I); smaller ones get sigma^2*I.
std::vector<MergedClique> merge_cliques(const std::vector<Configuration>& configs,
                                        const World& world, double motion_step, double sigma);

/// Gaussian mixture assembled from the merged cliques, equal weights.
GmmSampler sampler_from_cliques(const std::vector<MergedClique>& cliques, double sigma);

}  // namespace glplan
