#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace glplan {

inline constexpr double kPi = 3.14159265358979323846;

/// Default max-norm spacing between consecutive collision checks along a
/// C-space segment, radians.
inline constexpr double kDefaultMotionStep = 0.05;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

Point2 rotate_about(const Point2& p, const Point2& pivot, double theta);
double point_distance(const Point2& a, const Point2& b);

/// Distance from q to the closed segment [p0, p1]. Degenerate segments are
/// treated as points.
double segment_point_distance(const Point2& p0, const Point2& p1, const Point2& q);

/// True if the closed segments [a0,a1] and [b0,b1] share at least one point.
bool segments_intersect(const Point2& a0, const Point2& a1, const Point2& b0, const Point2& b1);

struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double r = 1.0;  // > 0
};

/// True iff the segment comes within r of the circle center; tangency counts.
bool segment_circle_collides(const Point2& p0, const Point2& p1, const Circle& c);

struct JointLimits {
  double lo = -kPi;
  double hi = kPi;

  bool full_circle() const { return hi - lo >= 2.0 * kPi - 1e-12; }
  bool contains(double a) const { return a >= lo && a <= hi; }
  double clamp(double a) const;
  double width() const { return hi - lo; }
};

/// Fixed-base planar serial chain. Joint i rotates the frame of link i
/// relative to link i-1; link lengths are in workspace units.
struct ChainSpec {
  double base_x = 0.0;
  double base_y = 0.0;
  std::vector<double> link_lengths;       // all > 0
  std::vector<JointLimits> joint_limits;  // size == dof(), default [-pi, pi]
  bool self_collision_enabled = true;

  std::size_t dof() const { return link_lengths.size(); }
  Point2 base() const { return {base_x, base_y}; }
  double reach() const;

  /// Chain with every joint limited to [-pi, pi].
  static ChainSpec with_links(std::vector<double> lengths, Point2 base = {0.0, 0.0},
                              bool self_collision = true);
};

/// A C-space point: one wrapped angle per joint.
struct Configuration {
  std::vector<double> angles;

  Configuration() = default;
  explicit Configuration(std::vector<double> a) : angles(std::move(a)) {}
  static Configuration zeros(std::size_t dof) { return Configuration(std::vector<double>(dof, 0.0)); }

  std::size_t dof() const { return angles.size(); }
  double& operator[](std::size_t i) { return angles[i]; }
  double operator[](std::size_t i) const { return angles[i]; }
  bool operator==(const Configuration& o) const { return angles == o.angles; }
};

/// FK result: base point followed by each link endpoint, dof()+1 points.
struct ChainPose {
  std::vector<Point2> joint_points;
  const Point2& end_effector() const { return joint_points.back(); }
};

bool within_limits(const Configuration& q, const std::vector<JointLimits>& limits);

/// Signed per-joint displacement from a to b. Full-circle joints use the
/// shortest wrapped representative; bounded joints use the plain difference.
std::vector<double> joint_deltas(const Configuration& a, const Configuration& b,
                                 const std::vector<JointLimits>& limits);

/// Max-norm C-space distance under the same wrapping convention as
/// joint_deltas.
double cspace_distance(const Configuration& a, const Configuration& b,
                       const std::vector<JointLimits>& limits);

/// Point at parameter t in [0,1] on the straight C-space segment from a to b,
/// each full-circle joint moving along its shortest arc from a.
Configuration interpolate(const Configuration& a, const Configuration& b, double t,
                          const std::vector<JointLimits>& limits);

ChainPose forward_kinematics(const ChainSpec& spec, const Configuration& q);

/// One offending contact, for diagnostics. link indices are 0-based;
/// obstacle < 0 means self collision against other_link.
struct CollisionInfo {
  int link = -1;
  int obstacle = -1;
  int other_link = -1;
  std::string describe() const;
};

/// First collision of the chain at q against the obstacle set (and itself,
/// when enabled), or nullopt if q is free.
std::optional<CollisionInfo> find_collision(const ChainSpec& spec, const Configuration& q,
                                            const std::vector<Circle>& obstacles);

bool config_valid(const ChainSpec& spec, const Configuration& q,
                  const std::vector<Circle>& obstacles);

/// True iff every configuration on the straight C-space segment between q_a
/// and q_b is valid, checked at max-norm spacing <= step with both endpoints
/// included. Symmetric in (q_a, q_b) by construction. configs_checked, when
/// given, is incremented once per configuration evaluated.
bool motion_valid(const ChainSpec& spec, const Configuration& q_a, const Configuration& q_b,
                  const std::vector<Circle>& obstacles, double step = kDefaultMotionStep,
                  std::uint64_t* configs_checked = nullptr);

}  // namespace glplan
