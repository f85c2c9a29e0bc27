#include "glplan/workspace.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace glplan {

double surface_gap(const Circle& a, const Circle& b) {
  return point_distance({a.cx, a.cy}, {b.cx, b.cy}) - a.r - b.r;
}

namespace {

bool precedes(const Circle& a, const Circle& b, const Point2& base) {
  const double da = point_distance({a.cx, a.cy}, base);
  const double db = point_distance({b.cx, b.cy}, base);
  const double ang_a = std::atan2(a.cy - base.y, a.cx - base.x);
  const double ang_b = std::atan2(b.cy - base.y, b.cx - base.x);
  return std::tie(da, a.r, ang_a) < std::tie(db, b.r, ang_b);
}

Circle rotate_circle(const Circle& c, const Point2& pivot, double theta) {
  const Point2 p = rotate_about({c.cx, c.cy}, pivot, theta);
  return {p.x, p.y, c.r};
}

}  // namespace

LocalPrimitive make_primitive(const Circle& a, const Circle& b, const Point2& base) {
  if (precedes(b, a, base)) return {b, a};
  return {a, b};
}

std::vector<LocalPrimitive> decompose(const World& world, double gap_threshold) {
  if (gap_threshold <= 0.0) throw std::invalid_argument("decompose: gap_threshold must be > 0");
  const Point2 base = world.chain.base();
  std::vector<LocalPrimitive> primitives;
  for (std::size_t j = 0; j < world.obstacles.size(); ++j) {
    for (std::size_t k = j + 1; k < world.obstacles.size(); ++k) {
      if (surface_gap(world.obstacles[j], world.obstacles[k]) <= gap_threshold) {
        // Shift into the base frame so primitives are position-independent.
        Circle cj = world.obstacles[j];
        Circle ck = world.obstacles[k];
        cj.cx -= base.x;
        cj.cy -= base.y;
        ck.cx -= base.x;
        ck.cy -= base.y;
        primitives.push_back(make_primitive(cj, ck));
      }
    }
  }
  return primitives;
}

CanonicalPrimitive canonicalize(const LocalPrimitive& lw, const Point2& base) {
  LocalPrimitive ordered = make_primitive(lw.circle_a, lw.circle_b, base);
  for (int attempt = 0; attempt < 2; ++attempt) {
    const double dx = ordered.circle_a.cx - base.x;
    const double dy = ordered.circle_a.cy - base.y;
    if (std::hypot(dx, dy) < 1e-12) {
      throw std::invalid_argument("canonicalize: circle center coincides with the chain base");
    }
    const double theta = -std::atan2(dy, dx);
    LocalPrimitive rotated{rotate_circle(ordered.circle_a, base, theta),
                           rotate_circle(ordered.circle_b, base, theta)};
    // The ordering tiebreak on polar angle is not rotation invariant; when the
    // rotation flipped it, redo with the other circle as the anchor. Distance
    // and radius ties are required for a flip, so one retry settles it.
    if (!precedes(rotated.circle_b, rotated.circle_a, base)) {
      return {rotated, theta};
    }
    ordered = {ordered.circle_b, ordered.circle_a};
  }
  throw std::logic_error("canonicalize: ordering did not stabilize");
}

double descriptor_distance2(const Descriptor& a, const Descriptor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double similarity(const Descriptor& a, const Descriptor& b) {
  return -descriptor_distance2(a, b);
}

}  // namespace glplan
