#include "glplan/experience.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace glplan {

namespace {

// Point-in-capsule test against the cone capsule swept between the two
// circles: radius interpolates linearly along the center segment, and only
// the band between the centers counts (no end caps), so "in the gap" means
// beside both circles rather than behind one of them.
bool in_gap_capsule(const Point2& p, const LocalPrimitive& lw, double inflation) {
  const Point2 ca{lw.circle_a.cx, lw.circle_a.cy};
  const Point2 cb{lw.circle_b.cx, lw.circle_b.cy};
  const double dx = cb.x - ca.x;
  const double dy = cb.y - ca.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) {
    return point_distance(p, ca) <= lw.circle_a.r + inflation;
  }
  const double t = ((p.x - ca.x) * dx + (p.y - ca.y) * dy) / len2;
  if (t < 0.0 || t > 1.0) return false;
  const double radius = (1.0 - t) * lw.circle_a.r + t * lw.circle_b.r;
  return std::hypot(p.x - (ca.x + t * dx), p.y - (ca.y + t * dy)) <= radius + inflation;
}

}  // namespace

bool touches_gap_region(const ChainPose& pose, const LocalPrimitive& lw, double inflation) {
  for (const Point2& p : pose.joint_points) {
    if (in_gap_capsule(p, lw, inflation)) return true;
  }
  return false;
}

Circle bounding_circle(const LocalPrimitive& lw) {
  const Point2 ca{lw.circle_a.cx, lw.circle_a.cy};
  const Point2 cb{lw.circle_b.cx, lw.circle_b.cy};
  const double d = point_distance(ca, cb);
  // One disk may contain the other.
  if (d + lw.circle_b.r <= lw.circle_a.r) return lw.circle_a;
  if (d + lw.circle_a.r <= lw.circle_b.r) return lw.circle_b;
  const double radius = (d + lw.circle_a.r + lw.circle_b.r) / 2.0;
  const double t = (radius - lw.circle_a.r) / d;  // center along ca -> cb
  return {ca.x + t * (cb.x - ca.x), ca.y + t * (cb.y - ca.y), radius};
}

bool entirely_outside(const ChainPose& pose, const LocalPrimitive& lw, double clearance) {
  const Circle bound = bounding_circle(lw);
  for (const Point2& p : pose.joint_points) {
    if (point_distance(p, {bound.cx, bound.cy}) <= bound.r + clearance) return false;
  }
  return true;
}

namespace {

std::optional<Configuration> rejection_sample(
    const ChainSpec& chain, const std::vector<Circle>& obstacles, RandomStream& rng,
    std::uint64_t max_attempts, const std::function<bool(const ChainPose&)>& accept) {
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    const Configuration q = sample_uniform(chain.joint_limits, rng);
    const ChainPose pose = forward_kinematics(chain, q);
    if (!accept(pose)) continue;
    if (config_valid(chain, q, obstacles)) return q;
  }
  return std::nullopt;
}

std::vector<Configuration> dedup_configs(const std::vector<Configuration>& configs,
                                         const std::vector<JointLimits>& limits, double radius) {
  std::vector<Configuration> kept;
  for (const Configuration& q : configs) {
    bool duplicate = false;
    for (const Configuration& k : kept) {
      if (cspace_distance(q, k, limits) < radius) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(q);
  }
  return kept;
}

}  // namespace

LocalExperience generate_local_experience(const LocalPrimitive& lw, const ChainSpec& chain,
                                          const ExperienceConfig& cfg, RandomStream& rng) {
  if (std::hypot(chain.base_x, chain.base_y) > 1e-9) {
    throw std::invalid_argument("generate_local_experience: chain base must be at the origin");
  }
  LocalExperience out;
  const std::vector<Circle> obstacles{lw.circle_a, lw.circle_b};
  const World world{chain, obstacles};

  PlannerConfig planner_cfg;
  planner_cfg.kind = PlannerKind::kBirrt;
  planner_cfg.timeout_s = cfg.gen_timeout_s;
  planner_cfg.motion_step = cfg.motion_step;
  const GlSampler uniform = GlSampler::uniform_only(chain.joint_limits);

  std::vector<Configuration> pool;
  for (int query = 0; query < cfg.queries_per_primitive; ++query) {
    const auto start = rejection_sample(
        chain, obstacles, rng, cfg.max_rejection_attempts,
        [&](const ChainPose& pose) { return touches_gap_region(pose, lw, cfg.gap_region_inflation); });
    if (!start) {
      out.skip_reason = "no valid start inside the gap region after " +
                        std::to_string(cfg.max_rejection_attempts) + " attempts";
      return out;
    }
    const auto goal = rejection_sample(
        chain, obstacles, rng, cfg.max_rejection_attempts,
        [&](const ChainPose& pose) { return entirely_outside(pose, lw, cfg.clearance_radius); });
    if (!goal) {
      out.skip_reason = "no valid goal outside the primitive after " +
                        std::to_string(cfg.max_rejection_attempts) + " attempts";
      return out;
    }
    for (int run = 0; run < cfg.runs_per_query; ++run) {
      planner_cfg.rng_seed = rng.next_u64();
      const PlanResult result = plan(world, *start, *goal, uniform, planner_cfg);
      if (!result.solved()) continue;
      ++out.paths_solved;
      const Path cut = shortcut(*result.path, world, cfg.shortcut_iterations, rng, cfg.motion_step);
      pool.insert(pool.end(), cut.waypoints.begin(), cut.waypoints.end());
    }
  }
  if (pool.empty()) {
    out.skip_reason = "no training query solved within the generation budget";
    return out;
  }
  out.configs = dedup_configs(pool, chain.joint_limits, cfg.dedup_radius);
  return out;
}

Path shortcut(const Path& path, const World& world, int iterations, RandomStream& rng,
              double motion_step) {
  Path current = path;
  for (int it = 0; it < iterations; ++it) {
    const std::size_t n = current.waypoints.size();
    if (n < 3) break;
    const std::size_t i = rng.below(n - 2);
    const std::size_t j = i + 2 + rng.below(n - i - 2);
    if (motion_valid(world.chain, current.waypoints[i], current.waypoints[j], world.obstacles,
                     motion_step)) {
      current.waypoints.erase(current.waypoints.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                              current.waypoints.begin() + static_cast<std::ptrdiff_t>(j));
    }
  }
  return current;
}

std::vector<MergedClique> merge_cliques(const std::vector<Configuration>& configs,
                                        const World& world, double motion_step, double sigma) {
  const int n = static_cast<int>(configs.size());
  std::vector<MergedClique> cliques;
  if (n == 0) return cliques;
  const std::size_t dof = configs.front().dof();
  const std::vector<JointLimits>& limits = world.chain.joint_limits;

  // Visibility graph: edge iff the straight segment is collision free.
  std::vector<std::vector<bool>> adjacent(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (motion_valid(world.chain, configs[i], configs[j], world.obstacles, motion_step)) {
        adjacent[i][j] = adjacent[j][i] = true;
      }
    }
  }

  std::vector<bool> assigned(n, false);
  int remaining = n;
  while (remaining > 0) {
    // Degrees within the unassigned subgraph.
    std::vector<int> degree(n, 0);
    for (int i = 0; i < n; ++i) {
      if (assigned[i]) continue;
      for (int j = 0; j < n; ++j) {
        if (!assigned[j] && adjacent[i][j]) ++degree[i];
      }
    }
    int seed = -1;
    for (int i = 0; i < n; ++i) {
      if (!assigned[i] && (seed < 0 || degree[i] > degree[seed])) seed = i;
    }

    std::vector<int> members{seed};
    std::vector<int> candidates;
    for (int i = 0; i < n; ++i) {
      if (!assigned[i] && i != seed) candidates.push_back(i);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) { return degree[a] > degree[b]; });
    for (int c : candidates) {
      bool adjacent_to_all = true;
      for (int m : members) {
        if (!adjacent[c][m]) {
          adjacent_to_all = false;
          break;
        }
      }
      if (adjacent_to_all) members.push_back(c);
    }

    // Mean over representatives unwrapped nearest the seed configuration.
    const Configuration& anchor = configs[seed];
    std::vector<Eigen::VectorXd> reps;
    reps.reserve(members.size());
    for (int m : members) {
      const std::vector<double> d = joint_deltas(anchor, configs[m], limits);
      Eigen::VectorXd rep(static_cast<Eigen::Index>(dof));
      for (std::size_t j = 0; j < dof; ++j) {
        rep[static_cast<Eigen::Index>(j)] = anchor[j] + d[j];
      }
      reps.push_back(std::move(rep));
    }
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof));
    for (const auto& r : reps) mu += r;
    mu /= static_cast<double>(reps.size());

    MergedClique clique;
    clique.members = members;
    clique.mean.angles.resize(dof);
    for (std::size_t j = 0; j < dof; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      clique.mean[j] = limits[j].full_circle() ? wrap_angle(mu[jj]) : limits[j].clamp(mu[jj]);
    }
    if (reps.size() >= dof + 1) {
      Eigen::MatrixXd cov =
          Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dof), static_cast<Eigen::Index>(dof));
      for (const auto& r : reps) {
        const Eigen::VectorXd d = r - mu;
        cov += d * d.transpose();
      }
      cov /= static_cast<double>(reps.size() - 1);
      cov += 1e-6 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dof),
                                              static_cast<Eigen::Index>(dof));
      clique.covariance = cov;
    } else {
      clique.covariance = sigma * sigma *
                          Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dof),
                                                    static_cast<Eigen::Index>(dof));
    }
    cliques.push_back(std::move(clique));

    for (int m : members) assigned[m] = true;
    remaining -= static_cast<int>(members.size());
  }
  return cliques;
}

GmmSampler sampler_from_cliques(const std::vector<MergedClique>& cliques, double sigma) {
  if (cliques.empty()) {
    throw std::invalid_argument("sampler_from_cliques: no cliques");
  }
  const std::size_t dof = cliques.front().mean.dof();
  std::vector<Mixture> mixtures;
  mixtures.reserve(cliques.size());
  for (const MergedClique& c : cliques) {
    if (c.member_count() >= static_cast<int>(dof) + 1) {
      mixtures.push_back(Mixture::with_covariance(c.mean, c.covariance));
    } else {
      mixtures.push_back(Mixture::with_sigma(c.mean, sigma));
    }
  }
  return GmmSampler::equal_weights(std::move(mixtures));
}

}  // namespace glplan
