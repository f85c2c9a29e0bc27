#include "glplan/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace glplan {

PlannerKind planner_kind_from_string(const std::string& name) {
  if (name == "rrt") return PlannerKind::kRrt;
  if (name == "birrt") return PlannerKind::kBirrt;
  if (name == "prm") return PlannerKind::kPrm;
  throw std::invalid_argument("unknown planner: " + name);
}

std::string to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kRrt:
      return "rrt";
    case PlannerKind::kBirrt:
      return "birrt";
    case PlannerKind::kPrm:
      return "prm";
  }
  return "?";
}

double path_length(const Path& path, const std::vector<JointLimits>& limits) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
    total += cspace_distance(path.waypoints[i], path.waypoints[i + 1], limits);
  }
  return total;
}

ValidityChecker::ValidityChecker(const ChainSpec& chain, std::vector<Circle> obstacles,
                                 double motion_step)
    : chain_(chain), obstacles_(std::move(obstacles)), motion_step_(motion_step) {
  const std::uint64_t links = chain_.dof();
  const std::uint64_t self_pairs =
      chain_.self_collision_enabled && links >= 2 ? links * (links - 1) / 2 - (links - 1) : 0;
  units_per_config_ = links * obstacles_.size() + self_pairs + 1;
}

bool ValidityChecker::valid(const Configuration& q) {
  units_ += units_per_config_;
  return config_valid(chain_, q, obstacles_);
}

bool ValidityChecker::motion(const Configuration& a, const Configuration& b) {
  std::uint64_t configs = 0;
  const bool ok = motion_valid(chain_, a, b, obstacles_, motion_step_, &configs);
  units_ += configs * units_per_config_;
  return ok;
}

int Tree::nearest(const Configuration& q, const std::vector<JointLimits>& limits) const {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double d = cspace_distance(nodes[i].q, q, limits);
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<Configuration> Tree::branch_to_root(int node) const {
  std::vector<Configuration> branch;
  for (int v = node; v >= 0; v = nodes[v].parent) branch.push_back(nodes[v].q);
  std::reverse(branch.begin(), branch.end());
  return branch;
}

namespace {

ExtendResult extend_impl(Tree& tree, const Configuration& target, double step,
                         ValidityChecker& checker, int* out_node) {
  const std::vector<JointLimits>& limits = checker.chain().joint_limits;
  checker.charge(tree.nodes.size());  // nearest-neighbor scan
  const int near = tree.nearest(target, limits);
  const Configuration& q_near = tree.nodes[near].q;
  const double dist = cspace_distance(q_near, target, limits);
  if (dist == 0.0) {
    if (out_node) *out_node = near;
    return ExtendResult::kReached;
  }
  const bool reaches = dist <= step;
  const Configuration q_new = reaches ? target : interpolate(q_near, target, step / dist, limits);
  if (!checker.motion(q_near, q_new)) return ExtendResult::kTrapped;
  tree.nodes.push_back({q_new, near});
  if (out_node) *out_node = static_cast<int>(tree.nodes.size()) - 1;
  return reaches ? ExtendResult::kReached : ExtendResult::kAdvanced;
}

}  // namespace

ExtendResult rrt_extend(Tree& tree, const Configuration& target, double step,
                        ValidityChecker& checker) {
  if (tree.nodes.empty()) throw std::invalid_argument("rrt_extend: tree is empty");
  return extend_impl(tree, target, step, checker, nullptr);
}

int Roadmap::add_vertex(const Configuration& q) {
  vertices.push_back(q);
  adjacency.emplace_back();
  parent_.push_back(static_cast<int>(parent_.size()));
  return static_cast<int>(vertices.size()) - 1;
}

void Roadmap::add_edge(int a, int b, double length) {
  adjacency[a].push_back({b, length});
  adjacency[b].push_back({a, length});
  const int ra = find(a);
  const int rb = find(b);
  if (ra != rb) parent_[ra] = rb;
}

int Roadmap::find(int v) const {
  while (parent_[v] != v) {
    parent_[v] = parent_[parent_[v]];
    v = parent_[v];
  }
  return v;
}

bool Roadmap::same_component(int a, int b) const { return find(a) == find(b); }

void prm_grow(Roadmap& roadmap, const std::vector<Configuration>& batch, int k,
              ValidityChecker& checker, std::uint64_t* discarded) {
  if (k < 1) throw std::invalid_argument("prm_grow: k must be >= 1");
  const std::vector<JointLimits>& limits = checker.chain().joint_limits;
  for (const Configuration& q : batch) {
    if (!checker.valid(q)) {
      if (discarded) ++*discarded;
      continue;
    }
    const int existing = static_cast<int>(roadmap.vertices.size());
    checker.charge(static_cast<std::uint64_t>(existing) * 2);  // distance scan + sort
    std::vector<std::pair<double, int>> by_dist;
    by_dist.reserve(existing);
    for (int i = 0; i < existing; ++i) {
      by_dist.emplace_back(cspace_distance(roadmap.vertices[i], q, limits), i);
    }
    std::sort(by_dist.begin(), by_dist.end());
    const int v = roadmap.add_vertex(q);
    const int attempts = std::min<int>(k, existing);
    for (int i = 0; i < attempts; ++i) {
      const auto [dist, u] = by_dist[i];
      if (checker.motion(roadmap.vertices[u], q)) roadmap.add_edge(u, v, dist);
    }
  }
}

Path extract_path(const Roadmap& roadmap, int start_vertex, int goal_vertex,
                  const std::vector<JointLimits>& limits) {
  (void)limits;  // edge lengths are stored at insertion time
  const int n = static_cast<int>(roadmap.vertices.size());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> prev(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[start_vertex] = 0.0;
  queue.push({0.0, start_vertex});
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    if (v == goal_vertex) break;
    for (const Roadmap::Edge& e : roadmap.adjacency[v]) {
      const double nd = d + e.length;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        prev[e.to] = v;
        queue.push({nd, e.to});
      }
    }
  }
  if (!std::isfinite(dist[goal_vertex])) {
    throw std::runtime_error("extract_path: start and goal are not connected");
  }
  Path path;
  for (int v = goal_vertex; v >= 0; v = prev[v]) path.waypoints.push_back(roadmap.vertices[v]);
  std::reverse(path.waypoints.begin(), path.waypoints.end());
  return path;
}

namespace {

struct RunState {
  ValidityChecker& checker;
  const GlSampler& sampler;
  const PlannerConfig& cfg;
  RandomStream rng;
  PlanResult result;

  bool over_budget() const { return checker.elapsed_model_s() >= cfg.timeout_s; }

  Configuration draw() {
    bool biased = false;
    Configuration q = sampler.sample(rng, &biased);
    if (biased) ++result.biased_sample_count;
    return q;
  }
};

void solve_with(RunState& state, Path path) {
  state.result.outcome = PlanResult::Outcome::kSolved;
  state.result.path = std::move(path);
}

void run_rrt(RunState& state, const Configuration& start, const Configuration& goal) {
  const std::vector<JointLimits>& limits = state.checker.chain().joint_limits;
  Tree tree;
  tree.nodes.push_back({start, -1});
  if (cspace_distance(start, goal, limits) <= state.cfg.rrt_step &&
      state.checker.motion(start, goal)) {
    solve_with(state, Path{{start, goal}});
    return;
  }
  while (!state.over_budget()) {
    ++state.result.iterations;
    Configuration x;
    if (state.rng.uniform01() < state.cfg.rrt_goal_bias) {
      x = goal;
    } else {
      x = state.draw();
    }
    int node = -1;
    const std::size_t before = tree.nodes.size();
    const ExtendResult r = extend_impl(tree, x, state.cfg.rrt_step, state.checker, &node);
    if (r == ExtendResult::kTrapped) continue;
    if (tree.nodes.size() > before) ++state.result.valid_sample_count;
    const Configuration& q_new = tree.nodes[node].q;
    if (r == ExtendResult::kReached && q_new == goal) {
      solve_with(state, Path{tree.branch_to_root(node)});
      return;
    }
    if (cspace_distance(q_new, goal, limits) <= state.cfg.rrt_step &&
        state.checker.motion(q_new, goal)) {
      tree.nodes.push_back({goal, node});
      solve_with(state, Path{tree.branch_to_root(static_cast<int>(tree.nodes.size()) - 1)});
      return;
    }
  }
}

void run_birrt(RunState& state, const Configuration& start, const Configuration& goal) {
  const std::vector<JointLimits>& limits = state.checker.chain().joint_limits;
  if (cspace_distance(start, goal, limits) <= state.cfg.rrt_step &&
      state.checker.motion(start, goal)) {
    solve_with(state, Path{{start, goal}});
    return;
  }
  Tree ta;
  Tree tb;
  ta.nodes.push_back({start, -1});
  tb.nodes.push_back({goal, -1});
  bool a_is_start = true;
  while (!state.over_budget()) {
    ++state.result.iterations;
    const Configuration x = state.draw();
    int anchor = -1;
    const std::size_t before_a = ta.nodes.size();
    const ExtendResult ra = extend_impl(ta, x, state.cfg.rrt_step, state.checker, &anchor);
    if (ra != ExtendResult::kTrapped) {
      if (ta.nodes.size() > before_a) ++state.result.valid_sample_count;
      const Configuration target = ta.nodes[anchor].q;
      // Greedy connect of the other tree toward the fresh node.
      int link = -1;
      ExtendResult rc;
      do {
        const std::size_t before_b = tb.nodes.size();
        rc = extend_impl(tb, target, state.cfg.rrt_step, state.checker, &link);
        if (tb.nodes.size() > before_b) ++state.result.valid_sample_count;
      } while (rc == ExtendResult::kAdvanced && !state.over_budget());
      if (rc == ExtendResult::kReached) {
        const Tree& start_tree = a_is_start ? ta : tb;
        const Tree& goal_tree = a_is_start ? tb : ta;
        const int start_node = a_is_start ? anchor : link;
        const int goal_node = a_is_start ? link : anchor;
        std::vector<Configuration> waypoints = start_tree.branch_to_root(start_node);
        std::vector<Configuration> tail = goal_tree.branch_to_root(goal_node);
        std::reverse(tail.begin(), tail.end());
        // Both branches end at the junction configuration; keep one copy.
        waypoints.insert(waypoints.end(), tail.begin() + 1, tail.end());
        solve_with(state, Path{std::move(waypoints)});
        return;
      }
    }
    std::swap(ta, tb);
    a_is_start = !a_is_start;
  }
}

void run_prm(RunState& state, const Configuration& start, const Configuration& goal) {
  const std::vector<JointLimits>& limits = state.checker.chain().joint_limits;
  Roadmap roadmap;
  const int vs = roadmap.add_vertex(start);
  const int vg = roadmap.add_vertex(goal);
  if (state.checker.motion(start, goal)) {
    roadmap.add_edge(vs, vg, cspace_distance(start, goal, limits));
  }
  while (true) {
    if (roadmap.same_component(vs, vg)) {
      solve_with(state, extract_path(roadmap, vs, vg, limits));
      return;
    }
    if (state.over_budget()) return;
    for (int i = 0; i < state.cfg.prm_batch && !state.over_budget(); ++i) {
      ++state.result.iterations;
      const Configuration x = state.draw();
      const std::size_t before = roadmap.vertices.size();
      prm_grow(roadmap, {x}, state.cfg.prm_k_neighbors, state.checker);
      if (roadmap.vertices.size() > before) ++state.result.valid_sample_count;
    }
  }
}

}  // namespace

PlanResult plan(const World& world, const Configuration& start, const Configuration& goal,
                const GlSampler& sampler, const PlannerConfig& cfg) {
  const ChainSpec& chain = world.chain;
  if (start.dof() != chain.dof() || goal.dof() != chain.dof()) {
    throw std::invalid_argument("plan: configuration dimension does not match the chain");
  }
  if (!within_limits(start, chain.joint_limits)) {
    throw std::invalid_argument("plan: start configuration violates joint limits");
  }
  if (!within_limits(goal, chain.joint_limits)) {
    throw std::invalid_argument("plan: goal configuration violates joint limits");
  }
  if (auto hit = find_collision(chain, start, world.obstacles)) {
    throw std::invalid_argument("plan: start in collision (" + hit->describe() + ")");
  }
  if (auto hit = find_collision(chain, goal, world.obstacles)) {
    throw std::invalid_argument("plan: goal in collision (" + hit->describe() + ")");
  }
  if (cfg.timeout_s <= 0.0) throw std::invalid_argument("plan: timeout must be > 0");

  const auto wall_start = std::chrono::steady_clock::now();
  ValidityChecker checker(chain, world.obstacles, cfg.motion_step);
  RunState state{checker, sampler, cfg, RandomStream(cfg.rng_seed), PlanResult{}};

  switch (cfg.kind) {
    case PlannerKind::kRrt:
      run_rrt(state, start, goal);
      break;
    case PlannerKind::kBirrt:
      run_birrt(state, start, goal);
      break;
    case PlannerKind::kPrm:
      run_prm(state, start, goal);
      break;
  }

  state.result.elapsed_s = checker.elapsed_model_s();
  state.result.wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return state.result;
}

}  // namespace glplan
