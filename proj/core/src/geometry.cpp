#include "glplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glplan {

double wrap_angle(double a) {
  if (a > -kPi && a <= kPi) return a;
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w <= 0.0) w += 2.0 * kPi;  // fmod result in (-2pi, 2pi); shift to (0, 2pi]
  return w - kPi;
}

Point2 rotate_about(const Point2& p, const Point2& pivot, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double dx = p.x - pivot.x;
  const double dy = p.y - pivot.y;
  return {pivot.x + c * dx - s * dy, pivot.y + s * dx + c * dy};
}

double point_distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double segment_point_distance(const Point2& p0, const Point2& p1, const Point2& q) {
  const double dx = p1.x - p0.x;
  const double dy = p1.y - p0.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return point_distance(p0, q);
  double t = ((q.x - p0.x) * dx + (q.y - p0.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(q.x - (p0.x + t * dx), q.y - (p0.y + t * dy));
}

namespace {

// Sign of the cross product (b-a) x (c-a).
int orientation(const Point2& a, const Point2& b, const Point2& c) {
  const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(const Point2& a0, const Point2& a1, const Point2& b0, const Point2& b1) {
  const int o1 = orientation(a0, a1, b0);
  const int o2 = orientation(a0, a1, b1);
  const int o3 = orientation(b0, b1, a0);
  const int o4 = orientation(b0, b1, a1);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a0, a1, b0)) return true;
  if (o2 == 0 && on_segment(a0, a1, b1)) return true;
  if (o3 == 0 && on_segment(b0, b1, a0)) return true;
  if (o4 == 0 && on_segment(b0, b1, a1)) return true;
  return false;
}

bool segment_circle_collides(const Point2& p0, const Point2& p1, const Circle& c) {
  return segment_point_distance(p0, p1, {c.cx, c.cy}) <= c.r;
}

double JointLimits::clamp(double a) const { return std::clamp(a, lo, hi); }

double ChainSpec::reach() const {
  double sum = 0.0;
  for (double l : link_lengths) sum += l;
  return sum;
}

ChainSpec ChainSpec::with_links(std::vector<double> lengths, Point2 base, bool self_collision) {
  ChainSpec spec;
  spec.base_x = base.x;
  spec.base_y = base.y;
  spec.joint_limits.assign(lengths.size(), JointLimits{});
  spec.link_lengths = std::move(lengths);
  spec.self_collision_enabled = self_collision;
  return spec;
}

bool within_limits(const Configuration& q, const std::vector<JointLimits>& limits) {
  if (q.dof() != limits.size()) return false;
  for (std::size_t i = 0; i < limits.size(); ++i) {
    if (!limits[i].contains(q[i])) return false;
  }
  return true;
}

std::vector<double> joint_deltas(const Configuration& a, const Configuration& b,
                                 const std::vector<JointLimits>& limits) {
  if (a.dof() != b.dof() || a.dof() != limits.size()) {
    throw std::invalid_argument("joint_deltas: dimension mismatch");
  }
  std::vector<double> d(a.dof());
  for (std::size_t i = 0; i < a.dof(); ++i) {
    d[i] = limits[i].full_circle() ? wrap_angle(b[i] - a[i]) : b[i] - a[i];
  }
  return d;
}

double cspace_distance(const Configuration& a, const Configuration& b,
                       const std::vector<JointLimits>& limits) {
  double m = 0.0;
  for (double d : joint_deltas(a, b, limits)) m = std::max(m, std::fabs(d));
  return m;
}

Configuration interpolate(const Configuration& a, const Configuration& b, double t,
                          const std::vector<JointLimits>& limits) {
  const std::vector<double> d = joint_deltas(a, b, limits);
  Configuration q = a;
  for (std::size_t i = 0; i < q.dof(); ++i) {
    const double v = a[i] + t * d[i];
    q[i] = limits[i].full_circle() ? wrap_angle(v) : v;
  }
  return q;
}

ChainPose forward_kinematics(const ChainSpec& spec, const Configuration& q) {
  if (q.dof() != spec.dof()) {
    throw std::invalid_argument("forward_kinematics: configuration has " +
                                std::to_string(q.dof()) + " angles, chain has " +
                                std::to_string(spec.dof()) + " joints");
  }
  ChainPose pose;
  pose.joint_points.reserve(spec.dof() + 1);
  pose.joint_points.push_back(spec.base());
  double phi = 0.0;
  for (std::size_t i = 0; i < spec.dof(); ++i) {
    phi += q[i];
    const Point2& prev = pose.joint_points.back();
    pose.joint_points.push_back({prev.x + spec.link_lengths[i] * std::cos(phi),
                                 prev.y + spec.link_lengths[i] * std::sin(phi)});
  }
  return pose;
}

std::string CollisionInfo::describe() const {
  if (obstacle >= 0) {
    return "link " + std::to_string(link) + " hits obstacle " + std::to_string(obstacle);
  }
  return "link " + std::to_string(link) + " intersects link " + std::to_string(other_link);
}

std::optional<CollisionInfo> find_collision(const ChainSpec& spec, const Configuration& q,
                                            const std::vector<Circle>& obstacles) {
  const ChainPose pose = forward_kinematics(spec, q);
  const auto& pts = pose.joint_points;
  const int n = static_cast<int>(spec.dof());
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < static_cast<int>(obstacles.size()); ++k) {
      if (segment_circle_collides(pts[i], pts[i + 1], obstacles[k])) {
        return CollisionInfo{i, k, -1};
      }
    }
  }
  if (spec.self_collision_enabled) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 2; j < n; ++j) {
        if (segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1])) {
          return CollisionInfo{i, -1, j};
        }
      }
    }
  }
  return std::nullopt;
}

bool config_valid(const ChainSpec& spec, const Configuration& q,
                  const std::vector<Circle>& obstacles) {
  return !find_collision(spec, q, obstacles).has_value();
}

bool motion_valid(const ChainSpec& spec, const Configuration& q_a, const Configuration& q_b,
                  const std::vector<Circle>& obstacles, double step,
                  std::uint64_t* configs_checked) {
  if (step <= 0.0) throw std::invalid_argument("motion_valid: step must be > 0");
  // Canonical endpoint order makes the checked set independent of argument
  // order, so the predicate is exactly symmetric.
  const Configuration* a = &q_a;
  const Configuration* b = &q_b;
  if (std::lexicographical_compare(b->angles.begin(), b->angles.end(), a->angles.begin(),
                                   a->angles.end())) {
    std::swap(a, b);
  }
  const double dist = cspace_distance(*a, *b, spec.joint_limits);
  const int n = dist == 0.0 ? 0 : static_cast<int>(std::ceil(dist / step));
  for (int i = 0; i <= n; ++i) {
    if (configs_checked) ++*configs_checked;
    const Configuration q =
        n == 0 ? *a : interpolate(*a, *b, static_cast<double>(i) / n, spec.joint_limits);
    if (!config_valid(spec, q, obstacles)) return false;
  }
  return true;
}

}  // namespace glplan
