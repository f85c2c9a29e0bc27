#pragma once

#include <array>
#include <vector>

#include "glplan/geometry.hpp"

namespace glplan {

/// Retrieval threshold: an entry matches when the squared canonical
/// descriptor distance is strictly below this.
inline constexpr double kDefaultDistanceThreshold = 3.0;

/// Pairs of circles whose surface gap is at most this are decomposed into a
/// local primitive.
inline constexpr double kDefaultGapThreshold = 1.5;

struct World {
  ChainSpec chain;
  std::vector<Circle> obstacles;
};

/// 6-vector describing a pair of circles in the chain base frame:
/// (x_a, y_a, r_a, x_b, y_b, r_b).
using Descriptor = std::array<double, 6>;

/// An ordered pair of close circles, the unit of workspace decomposition.
/// Circles are expressed in the chain base frame (base at the origin);
/// circle_a is the one nearer the base under the canonical ordering.
struct LocalPrimitive {
  Circle circle_a;
  Circle circle_b;

  Descriptor descriptor() const {
    return {circle_a.cx, circle_a.cy, circle_a.r, circle_b.cx, circle_b.cy, circle_b.r};
  }
};

/// A primitive rotated about the base so that circle_a's center sits on the
/// positive x-axis, together with the rotation that got it there. Applying
/// Rot(-theta) recovers the original.
struct CanonicalPrimitive {
  LocalPrimitive primitive;
  double theta = 0.0;
};

/// Center distance minus both radii; negative when the circles overlap.
double surface_gap(const Circle& a, const Circle& b);

/// Orders the two circles canonically relative to base: nearer center first,
/// ties by smaller radius, then by smaller polar angle.
LocalPrimitive make_primitive(const Circle& a, const Circle& b, const Point2& base = {0.0, 0.0});

/// Every unordered pair of world obstacles whose surface gap is <= threshold,
/// canonical-ordered and translated into the chain base frame. A circle may
/// appear in several primitives or in none.
std::vector<LocalPrimitive> decompose(const World& world,
                                      double gap_threshold = kDefaultGapThreshold);

/// Rotates lw about base so circle_a's center lands on the positive x-axis.
/// Throws std::invalid_argument when circle_a is centered on the base.
CanonicalPrimitive canonicalize(const LocalPrimitive& lw, const Point2& base = {0.0, 0.0});

/// Negative squared Euclidean distance between descriptors; 0 iff equal.
double similarity(const Descriptor& a, const Descriptor& b);

double descriptor_distance2(const Descriptor& a, const Descriptor& b);

}  // namespace glplan
