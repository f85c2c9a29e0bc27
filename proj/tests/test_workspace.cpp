#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "glplan/workspace.hpp"
#include "test_support.hpp"

using namespace glplan;
using namespace glplan::test;

namespace {

// Brute-force decomposition oracle, independent loop over unordered pairs.
int count_close_pairs(const std::vector<Circle>& circles, double threshold) {
  int count = 0;
  for (std::size_t i = 0; i < circles.size(); ++i) {
    for (std::size_t j = i + 1; j < circles.size(); ++j) {
      const double gap = std::hypot(circles[i].cx - circles[j].cx, circles[i].cy - circles[j].cy) -
                         circles[i].r - circles[j].r;
      if (gap <= threshold) ++count;
    }
  }
  return count;
}

bool same_primitive(const LocalPrimitive& a, const LocalPrimitive& b, double tol = 1e-12) {
  return descriptor_distance2(a.descriptor(), b.descriptor()) < tol;
}

}  // namespace

TEST_CASE("decompose") {
  World world;
  world.chain = eight_link_chain();

  SUBCASE("touching circles form one primitive") {
    world.obstacles = {{0, 5, 1}, {0, 7, 1}};
    const auto primitives = decompose(world, 1.0);
    REQUIRE(primitives.size() == 1);
    CHECK(surface_gap(primitives[0].circle_a, primitives[0].circle_b) == doctest::Approx(0.0));
  }
  SUBCASE("far pairs are excluded, a circle may be in no primitive") {
    // Pairwise gaps: (A,B) = 0.5, (B,C) = 0.5, (A,C) > threshold, D isolated.
    world.obstacles = {{0, 3, 1}, {0, 5.5, 1}, {0, 8, 1}, {20, 0, 1}};
    const auto primitives = decompose(world, 1.0);
    CHECK(primitives.size() == 2);
    for (const auto& lw : primitives) {
      CHECK(lw.circle_a.cx != 20.0);
      CHECK(lw.circle_b.cx != 20.0);
    }
  }
  SUBCASE("matches the brute-force pair count on a 7-circle world") {
    RandomStream rng(41);
    for (int round = 0; round < 20; ++round) {
      world.obstacles.clear();
      for (int i = 0; i < 7; ++i) {
        world.obstacles.push_back({rng.uniform(-8, 8), rng.uniform(-8, 8), rng.uniform(1, 2)});
      }
      const auto primitives = decompose(world, kDefaultGapThreshold);
      CHECK(static_cast<int>(primitives.size()) ==
            count_close_pairs(world.obstacles, kDefaultGapThreshold));
    }
  }
  SUBCASE("invariant under permutation of the obstacle list") {
    RandomStream rng(43);
    world.obstacles.clear();
    for (int i = 0; i < 6; ++i) {
      world.obstacles.push_back({rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(0.8, 1.6)});
    }
    const auto original = decompose(world, kDefaultGapThreshold);
    World shuffled = world;
    std::reverse(shuffled.obstacles.begin(), shuffled.obstacles.end());
    const auto permuted = decompose(shuffled, kDefaultGapThreshold);
    REQUIRE(original.size() == permuted.size());
    for (const auto& lw : original) {
      const bool found = std::any_of(permuted.begin(), permuted.end(),
                                     [&](const LocalPrimitive& o) { return same_primitive(lw, o); });
      CHECK(found);
    }
  }
  SUBCASE("primitives are expressed in the base frame") {
    World offset;
    offset.chain = ChainSpec::with_links({1, 1}, {10.0, -2.0});
    offset.obstacles = {{12, -2, 0.5}, {13.5, -2, 0.5}};
    const auto primitives = decompose(offset, 1.0);
    REQUIRE(primitives.size() == 1);
    CHECK(primitives[0].circle_a.cx == doctest::Approx(2.0));
    CHECK(primitives[0].circle_a.cy == doctest::Approx(0.0));
  }
}

TEST_CASE("canonicalize") {
  SUBCASE("quarter turn") {
    const LocalPrimitive lw = make_primitive({0, 3, 1}, {0, 6, 1});
    const CanonicalPrimitive canonical = canonicalize(lw);
    CHECK(canonical.theta == doctest::Approx(-kPi / 2.0));
    CHECK(canonical.primitive.circle_a.cx == doctest::Approx(3.0));
    CHECK(std::fabs(canonical.primitive.circle_a.cy) < 1e-9);
  }
  SUBCASE("identity when already on the axis") {
    const LocalPrimitive lw = make_primitive({5, 0, 1}, {7, 0, 1});
    const CanonicalPrimitive canonical = canonicalize(lw);
    CHECK(canonical.theta == doctest::Approx(0.0));
    CHECK(same_primitive(canonical.primitive, lw, 1e-18));
  }
  SUBCASE("round trip restores the original") {
    RandomStream rng(47);
    for (int i = 0; i < 200; ++i) {
      const Circle a{rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(0.5, 2)};
      const Circle b{a.cx + rng.uniform(-3, 3), a.cy + rng.uniform(-3, 3), rng.uniform(0.5, 2)};
      if (std::hypot(a.cx, a.cy) < 0.1 || std::hypot(b.cx, b.cy) < 0.1) continue;
      const LocalPrimitive lw = make_primitive(a, b);
      const CanonicalPrimitive canonical = canonicalize(lw);
      const Point2 pa =
          rotate_about({canonical.primitive.circle_a.cx, canonical.primitive.circle_a.cy},
                       {0, 0}, -canonical.theta);
      const Point2 pb =
          rotate_about({canonical.primitive.circle_b.cx, canonical.primitive.circle_b.cy},
                       {0, 0}, -canonical.theta);
      CHECK(std::fabs(pa.x - lw.circle_a.cx) < 1e-9);
      CHECK(std::fabs(pa.y - lw.circle_a.cy) < 1e-9);
      CHECK(std::fabs(pb.x - lw.circle_b.cx) < 1e-9);
      CHECK(std::fabs(pb.y - lw.circle_b.cy) < 1e-9);
    }
  }
  SUBCASE("canonical form is rotation invariant") {
    RandomStream rng(53);
    for (int i = 0; i < 200; ++i) {
      const Circle a{rng.uniform(1, 6), rng.uniform(-6, 6), rng.uniform(0.5, 2)};
      const Circle b{a.cx + rng.uniform(0.5, 3), a.cy + rng.uniform(-3, 3), rng.uniform(0.5, 2)};
      const LocalPrimitive lw = make_primitive(a, b);
      const double phi = rng.uniform(-kPi, kPi);
      const Point2 ra = rotate_about({a.cx, a.cy}, {0, 0}, phi);
      const Point2 rb = rotate_about({b.cx, b.cy}, {0, 0}, phi);
      const LocalPrimitive rotated = make_primitive({ra.x, ra.y, a.r}, {rb.x, rb.y, b.r});
      const Descriptor d1 = canonicalize(lw).primitive.descriptor();
      const Descriptor d2 = canonicalize(rotated).primitive.descriptor();
      CHECK(descriptor_distance2(d1, d2) < 1e-18);
    }
  }
  SUBCASE("circle at the base is rejected") {
    const LocalPrimitive lw{{0, 0, 1}, {3, 0, 1}};
    CHECK_THROWS_AS(canonicalize(lw), std::invalid_argument);
  }
}

TEST_CASE("similarity") {
  const Descriptor a{1, 2, 3, 4, 5, 6};

  SUBCASE("identical descriptors score zero") { CHECK(similarity(a, a) == 0.0); }
  SUBCASE("unit difference in one coordinate scores -1") {
    Descriptor b = a;
    b[2] += 1.0;
    CHECK(similarity(a, b) == doctest::Approx(-1.0));
  }
  SUBCASE("unit difference in two coordinates scores -2") {
    Descriptor b = a;
    b[0] += 1.0;
    b[5] -= 1.0;
    CHECK(similarity(a, b) == doctest::Approx(-2.0));
  }
  SUBCASE("symmetric, non-positive, zero iff equal") {
    RandomStream rng(59);
    for (int i = 0; i < 500; ++i) {
      Descriptor x, y;
      for (int k = 0; k < 6; ++k) {
        x[k] = rng.uniform(-5, 5);
        y[k] = rng.uniform(-5, 5);
      }
      CHECK(similarity(x, y) == similarity(y, x));
      CHECK(similarity(x, y) <= 0.0);
      if (similarity(x, y) > -1e-12) {
        for (int k = 0; k < 6; ++k) CHECK(x[k] == doctest::Approx(y[k]));
      }
    }
  }
}
