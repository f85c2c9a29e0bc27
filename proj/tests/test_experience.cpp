#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "glplan/database.hpp"
#include "glplan/experience.hpp"
#include "test_support.hpp"

using namespace glplan;
using namespace glplan::test;

namespace {

// Exact minimum clique cover: chromatic number of the complement graph,
// found by backtracking with the usual new-color symmetry break.
int min_clique_cover(const std::vector<std::vector<bool>>& adjacent) {
  const int n = static_cast<int>(adjacent.size());
  if (n == 0) return 0;
  std::vector<std::vector<bool>> comp(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      comp[i][j] = i != j && !adjacent[i][j];
    }
  }
  std::vector<int> color(n, -1);
  const std::function<bool(int, int, int)> assign = [&](int v, int used, int k) {
    if (v == n) return true;
    const int limit = std::min(used + 1, k);
    for (int c = 0; c < limit; ++c) {
      bool clash = false;
      for (int u = 0; u < v; ++u) {
        if (comp[v][u] && color[u] == c) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      color[v] = c;
      if (assign(v + 1, std::max(used, c + 1), k)) return true;
      color[v] = -1;
    }
    return false;
  };
  for (int k = 1; k <= n; ++k) {
    std::fill(color.begin(), color.end(), -1);
    if (assign(0, 0, k)) return k;
  }
  return n;
}

LocalPrimitive reachable_primitive() {
  // Two radius-1.5 circles with a 0.8 gap, centered about 5 units out.
  return make_primitive({4.0, 0.0, 1.5}, {7.8, 0.0, 1.5});
}

ExperienceConfig fast_config() {
  ExperienceConfig cfg;
  cfg.runs_per_query = 3;
  cfg.queries_per_primitive = 2;
  cfg.shortcut_iterations = 60;
  cfg.gen_timeout_s = 3.0;
  return cfg;
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("gap and clearance region predicates") {
  const LocalPrimitive lw = reachable_primitive();
  const ChainSpec chain = eight_link_chain();

  SUBCASE("bounding circle contains both disks") {
    const Circle bound = bounding_circle(lw);
    CHECK(point_distance({lw.circle_a.cx, lw.circle_a.cy}, {bound.cx, bound.cy}) + lw.circle_a.r <=
          bound.r + 1e-9);
    CHECK(point_distance({lw.circle_b.cx, lw.circle_b.cy}, {bound.cx, bound.cy}) + lw.circle_b.r <=
          bound.r + 1e-9);
  }
  SUBCASE("a config threading the gap touches the region") {
    // Straight chain along +x passes right between the circle centers.
    const ChainPose pose = forward_kinematics(chain, Configuration::zeros(8));
    CHECK(touches_gap_region(pose, lw, 0.5));
    CHECK_FALSE(entirely_outside(pose, lw, 0.5));
  }
  SUBCASE("a config folded away from the primitive is entirely outside") {
    Configuration q = Configuration::zeros(8);
    q[0] = kPi;  // points away from the circles
    const ChainPose pose = forward_kinematics(chain, q);
    CHECK_FALSE(touches_gap_region(pose, lw, 0.5));
    CHECK(entirely_outside(pose, lw, 0.5));
  }
}

TEST_CASE("generate_local_experience") {
  const ChainSpec chain = eight_link_chain();

  SUBCASE("unreachable primitive is skipped with a diagnostic") {
    const LocalPrimitive far = make_primitive({50.0, 0.0, 1.5}, {53.5, 0.0, 1.5});
    ExperienceConfig cfg = fast_config();
    cfg.max_rejection_attempts = 20000;
    RandomStream rng(1);
    const LocalExperience exp = generate_local_experience(far, chain, cfg, rng);
    CHECK(exp.skipped());
    CHECK(exp.configs.empty());
    CHECK(exp.skip_reason.find("start") != std::string::npos);
  }
  SUBCASE("generated configurations are valid in the two-circle world") {
    const LocalPrimitive lw = reachable_primitive();
    RandomStream rng(2);
    const LocalExperience exp = generate_local_experience(lw, chain, fast_config(), rng);
    REQUIRE_FALSE(exp.skipped());
    REQUIRE_FALSE(exp.configs.empty());
    CHECK(exp.paths_solved > 0);
    const std::vector<Circle> world{lw.circle_a, lw.circle_b};
    for (const Configuration& q : exp.configs) {
      CHECK(config_valid(chain, q, world));
    }
  }
  SUBCASE("off-origin base is rejected") {
    ChainSpec off = chain;
    off.base_x = 1.0;
    RandomStream rng(3);
    CHECK_THROWS_AS(generate_local_experience(reachable_primitive(), off, fast_config(), rng),
                    std::invalid_argument);
  }
  SUBCASE("multiple runs produce at least two visibility clusters") {
    // Paths out of the gap can leave on either side of the primitive, which
    // straight segments cannot shortcut across the circles.
    const LocalPrimitive lw = reachable_primitive();
    ExperienceConfig cfg = fast_config();
    cfg.runs_per_query = 5;
    cfg.queries_per_primitive = 3;
    RandomStream rng(4);
    const LocalExperience exp = generate_local_experience(lw, chain, cfg, rng);
    REQUIRE_FALSE(exp.skipped());
    const World world{chain, {lw.circle_a, lw.circle_b}};
    const auto cliques = merge_cliques(exp.configs, world, cfg.motion_step, cfg.sigma);
    CHECK(cliques.size() >= 2);
  }
}

TEST_CASE("shortcut") {
  const ChainSpec chain = eight_link_chain(false);
  const World empty{chain, {}};

  SUBCASE("two waypoints stay untouched") {
    const Path path{{Configuration::zeros(8), Configuration(std::vector<double>(8, 1.0))}};
    RandomStream rng(5);
    const Path cut = shortcut(path, empty, 100, rng);
    CHECK(cut.waypoints.size() == 2);
  }
  SUBCASE("collinear middle waypoint is removed") {
    const Path path{{Configuration::zeros(8), Configuration(std::vector<double>(8, 0.5)),
                     Configuration(std::vector<double>(8, 1.0))}};
    RandomStream rng(6);
    const Path cut = shortcut(path, empty, 50, rng);
    CHECK(cut.waypoints.size() == 2);
    CHECK(cut.waypoints.front() == path.waypoints.front());
    CHECK(cut.waypoints.back() == path.waypoints.back());
  }
  SUBCASE("random valid paths only get shorter and stay valid") {
    const ChainSpec chain8 = eight_link_chain();
    RandomStream rng(7);
    int rounds = 0;
    while (rounds < 100) {
      std::vector<Circle> obstacles;
      for (int i = 0; i < 2; ++i) {
        obstacles.push_back(random_clear_circle(rng, 9.0, 0.8, 1.5));
      }
      const World world{chain8, obstacles};
      // Random valid multi-waypoint path: chain successive short valid hops.
      std::vector<Configuration> wp;
      Configuration current = random_config(chain8.joint_limits, rng);
      if (!config_valid(chain8, current, obstacles)) continue;
      wp.push_back(current);
      for (int hop = 0; hop < 6; ++hop) {
        for (int tries = 0; tries < 50; ++tries) {
          Configuration next = current;
          for (std::size_t j = 0; j < next.dof(); ++j) {
            next[j] = wrap_angle(next[j] + rng.uniform(-0.4, 0.4));
          }
          if (motion_valid(chain8, current, next, obstacles)) {
            wp.push_back(next);
            current = next;
            break;
          }
        }
      }
      if (wp.size() < 4) continue;
      const Path path{wp};
      const Path cut = shortcut(path, world, 40, rng);
      CHECK(path_length(cut, chain8.joint_limits) <=
            path_length(path, chain8.joint_limits) + 1e-12);
      CHECK(cut.waypoints.front() == path.waypoints.front());
      CHECK(cut.waypoints.back() == path.waypoints.back());
      for (std::size_t i = 0; i + 1 < cut.waypoints.size(); ++i) {
        CHECK(motion_valid(chain8, cut.waypoints[i], cut.waypoints[i + 1], obstacles));
      }
      ++rounds;
    }
  }
}

TEST_CASE("merge_cliques") {
  const ChainSpec chain = eight_link_chain();

  SUBCASE("pairwise visible configs collapse to one clique") {
    const World empty{eight_link_chain(false), {}};
    std::vector<Configuration> configs;
    RandomStream rng(8);
    for (int i = 0; i < 6; ++i) configs.push_back(random_config(chain.joint_limits, rng));
    const auto cliques = merge_cliques(configs, empty, 0.05, 0.1);
    REQUIRE(cliques.size() == 1);
    CHECK(cliques[0].member_count() == 6);
  }
  SUBCASE("blocked pair becomes two singletons") {
    const ChainSpec two = ChainSpec::with_links({1.0, 1.0});
    // Cage world: the two configurations sit in different free sectors.
    const double d2r = kPi / 180.0;
    const auto at = [&](double deg, double dist, double r) {
      return Circle{dist * std::cos(deg * d2r), dist * std::sin(deg * d2r), r};
    };
    const World cage{two, {at(90, 0.5, 0.354), at(210, 0.5, 0.354), at(330, 0.5, 0.354)}};
    const std::vector<Configuration> configs{Configuration({30 * d2r, 0.0}),
                                             Configuration({150 * d2r, 0.0})};
    const auto cliques = merge_cliques(configs, cage, 0.05, 0.1);
    REQUIRE(cliques.size() == 2);
    CHECK(cliques[0].member_count() == 1);
    CHECK(cliques[1].member_count() == 1);
  }
  SUBCASE("greedy cover: revalidates pairwise and stays near the optimum") {
    RandomStream rng(9);
    for (int round = 0; round < 20; ++round) {
      std::vector<Circle> obstacles;
      for (int i = 0; i < 3; ++i) {
        obstacles.push_back(random_clear_circle(rng, 8.0, 1.0, 2.0));
      }
      const World world{chain, obstacles};
      std::vector<Configuration> configs;
      while (configs.size() < 15) {
        const Configuration q = random_config(chain.joint_limits, rng);
        if (config_valid(chain, q, obstacles)) configs.push_back(q);
      }
      const auto cliques = merge_cliques(configs, world, 0.05, 0.1);

      // Partition property.
      std::size_t total = 0;
      for (const auto& c : cliques) total += c.members.size();
      CHECK(total == configs.size());

      // Pairwise revalidation.
      for (const auto& c : cliques) {
        for (std::size_t i = 0; i < c.members.size(); ++i) {
          for (std::size_t j = i + 1; j < c.members.size(); ++j) {
            CHECK(motion_valid(chain, configs[c.members[i]], configs[c.members[j]], obstacles));
          }
        }
      }

      // Independent visibility graph for the exact cover oracle.
      std::vector<std::vector<bool>> adjacent(15, std::vector<bool>(15, false));
      for (int i = 0; i < 15; ++i) {
        for (int j = i + 1; j < 15; ++j) {
          if (motion_valid(chain, configs[i], configs[j], obstacles)) {
            adjacent[i][j] = adjacent[j][i] = true;
          }
        }
      }
      const int optimum = min_clique_cover(adjacent);
      CHECK(static_cast<int>(cliques.size()) >= optimum);
      CHECK(static_cast<int>(cliques.size()) <= optimum + 2);
    }
  }
  SUBCASE("large cliques get fitted covariances, small ones isotropic") {
    const World empty{eight_link_chain(false), {}};
    RandomStream rng(10);
    std::vector<Configuration> configs;
    for (int i = 0; i < 12; ++i) {
      Configuration q = Configuration::zeros(8);
      for (std::size_t j = 0; j < 8; ++j) q[j] = rng.uniform(-0.3, 0.3);
      configs.push_back(q);
    }
    const auto cliques = merge_cliques(configs, empty, 0.05, 0.1);
    REQUIRE(cliques.size() == 1);
    REQUIRE(cliques[0].member_count() == 12);  // >= dof + 1
    // Fitted covariance differs from sigma^2 I and keeps the jitter floor.
    const Eigen::MatrixXd& cov = cliques[0].covariance;
    CHECK(cov.rows() == 8);
    CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    CHECK(eig.eigenvalues().minCoeff() >= 1e-6 - 1e-12);
  }
}

TEST_CASE("build_entry") {
  const ChainSpec chain = eight_link_chain();
  const LocalPrimitive lw = reachable_primitive();

  RandomStream rng(11);
  const BuildEntryOutcome outcome = build_entry(lw, chain, fast_config(), rng, "unit-test");
  REQUIRE(outcome.entry.has_value());
  const DatabaseEntry& entry = *outcome.entry;

  SUBCASE("weights are uniform") {
    const double expect = 1.0 / static_cast<double>(entry.sampler.mixture_count());
    for (double w : entry.sampler.weights()) CHECK(w == doctest::Approx(expect));
  }
  SUBCASE("provenance counts form a partition and merging is effective") {
    CHECK(entry.provenance.configs_before_merge > 0);
    CHECK(entry.provenance.configs_after_merge ==
          static_cast<int>(entry.sampler.mixture_count()));
    CHECK(entry.provenance.configs_after_merge < entry.provenance.configs_before_merge);
    CHECK(entry.provenance.source == "unit-test");
  }
  SUBCASE("descriptor is canonical") {
    CHECK(entry.canonical_descriptor[1] == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("transform_sampler") {
  RandomStream rng(12);
  std::vector<Mixture> mix;
  for (int i = 0; i < 3; ++i) {
    mix.push_back(Mixture::with_sigma(random_config(std::vector<JointLimits>(8, JointLimits{}), rng),
                                      0.1));
  }
  const GmmSampler g = GmmSampler::equal_weights(mix);

  SUBCASE("zero rotation is the identity") {
    const GmmSampler t = transform_sampler(g, 0.0);
    for (std::size_t m = 0; m < g.mixture_count(); ++m) {
      CHECK(t.mixtures()[m].mean == g.mixtures()[m].mean);
    }
  }
  SUBCASE("full turn wraps back to the identity") {
    const GmmSampler t = transform_sampler(g, 2.0 * kPi);
    for (std::size_t m = 0; m < g.mixture_count(); ++m) {
      for (std::size_t j = 0; j < 8; ++j) {
        CHECK(t.mixtures()[m].mean[j] == doctest::Approx(g.mixtures()[m].mean[j]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("only the first joint moves; covariances and weights are untouched") {
    const GmmSampler t = transform_sampler(g, 0.7);
    CHECK(t.weights() == g.weights());
    for (std::size_t m = 0; m < g.mixture_count(); ++m) {
      CHECK(t.mixtures()[m].mean[0] ==
            doctest::Approx(wrap_angle(g.mixtures()[m].mean[0] + 0.7)));
      for (std::size_t j = 1; j < 8; ++j) {
        CHECK(t.mixtures()[m].mean[j] == g.mixtures()[m].mean[j]);
      }
      CHECK(t.mixtures()[m].sigma == g.mixtures()[m].sigma);
    }
  }
}

TEST_CASE("joint-1 shift commutes with world rotation for collision status") {
  // The rotational-transfer soundness claim, checked exactly.
  const ChainSpec chain = eight_link_chain();
  RandomStream rng(13);
  for (int i = 0; i < 1000; ++i) {
    World world{chain, {}};
    const int m = 1 + static_cast<int>(rng.below(3));
    for (int k = 0; k < m; ++k) {
      world.obstacles.push_back({rng.uniform(-9, 9), rng.uniform(-9, 9), rng.uniform(0.5, 2.0)});
    }
    const Configuration q = random_config(chain.joint_limits, rng);
    const double theta = rng.uniform(-kPi, kPi);
    Configuration shifted = q;
    shifted[0] = wrap_angle(shifted[0] + theta);
    const World rotated = rotate_world(world, theta);
    CHECK(config_valid(chain, q, world.obstacles) ==
          config_valid(chain, shifted, rotated.obstacles));
  }
}

TEST_CASE("database insert, retrieve, and rotation transfer") {
  const ChainSpec chain = eight_link_chain();
  const LocalPrimitive lw = reachable_primitive();
  ExperienceDatabase db(8);

  SUBCASE("empty database returns nothing") {
    CHECK_FALSE(db.retrieve(lw).has_value());
  }

  RandomStream rng(14);
  BuildEntryOutcome built = build_entry(lw, chain, fast_config(), rng, "db-test");
  REQUIRE(built.entry.has_value());
  const GmmSampler stored = built.entry->sampler;
  db.insert(std::move(*built.entry));

  SUBCASE("exact query hits at distance zero") {
    const auto hit = db.retrieve(lw);
    REQUIRE(hit.has_value());
    CHECK(hit->entry_index == 0);
    CHECK(hit->distance2 == doctest::Approx(0.0).epsilon(1e-15));
    // lw is already canonical (centers on the +x axis), so theta == 0 and the
    // sampler comes back unrotated.
    CHECK(std::fabs(hit->theta) < 1e-9);
    for (std::size_t m = 0; m < stored.mixture_count(); ++m) {
      for (std::size_t j = 0; j < 8; ++j) {
        CHECK(hit->sampler.mixtures()[m].mean[j] ==
              doctest::Approx(stored.mixtures()[m].mean[j]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("rotated query retrieves the same entry, means shifted in joint 1") {
    const double phi = 1.1;
    const Point2 pa = rotate_about({lw.circle_a.cx, lw.circle_a.cy}, {0, 0}, phi);
    const Point2 pb = rotate_about({lw.circle_b.cx, lw.circle_b.cy}, {0, 0}, phi);
    const LocalPrimitive rotated =
        make_primitive({pa.x, pa.y, lw.circle_a.r}, {pb.x, pb.y, lw.circle_b.r});
    const auto hit = db.retrieve(rotated);
    REQUIRE(hit.has_value());
    CHECK(hit->entry_index == 0);
    CHECK(hit->distance2 < 1e-12);
    for (std::size_t m = 0; m < stored.mixture_count(); ++m) {
      CHECK(hit->sampler.mixtures()[m].mean[0] ==
            doctest::Approx(wrap_angle(stored.mixtures()[m].mean[0] + phi)).epsilon(1e-9));
      for (std::size_t j = 1; j < 8; ++j) {
        CHECK(hit->sampler.mixtures()[m].mean[j] ==
              doctest::Approx(stored.mixtures()[m].mean[j]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("beyond-threshold queries miss") {
    const LocalPrimitive far = make_primitive({4.0, 0.0, 1.5}, {7.8, 3.5, 1.5});
    CHECK_FALSE(db.retrieve(far).has_value());
  }
  SUBCASE("near-duplicate insert replaces instead of duplicating") {
    REQUIRE(db.size() == 1);
    DatabaseEntry dup{db.entries()[0].canonical_descriptor, stored, {"replacement", "", 1, 1}};
    dup.canonical_descriptor[0] += 1e-5;  // within the 1e-6 squared-distance dedup
    db.insert(std::move(dup));
    CHECK(db.size() == 1);
    CHECK(db.entries()[0].provenance.source == "replacement");
  }
}

TEST_CASE("database round trip and format validation") {
  const std::string path = temp_file("glplan_test_db.json");
  const ChainSpec chain = eight_link_chain();

  SUBCASE("save/load is lossless") {
    ExperienceDatabase db(8, 3.0, 0.1);
    RandomStream rng(15);
    BuildEntryOutcome built = build_entry(reachable_primitive(), chain, fast_config(), rng, "rt");
    REQUIRE(built.entry.has_value());
    db.insert(std::move(*built.entry));
    save_db(db, path);
    const ExperienceDatabase loaded = load_db(path);
    REQUIRE(loaded.size() == db.size());
    CHECK(loaded.dof() == 8);
    CHECK(loaded.distance_threshold() == doctest::Approx(3.0));
    const DatabaseEntry& a = db.entries()[0];
    const DatabaseEntry& b = loaded.entries()[0];
    for (int i = 0; i < 6; ++i) {
      CHECK(std::fabs(a.canonical_descriptor[i] - b.canonical_descriptor[i]) <= 1e-12);
    }
    REQUIRE(a.sampler.mixture_count() == b.sampler.mixture_count());
    for (std::size_t m = 0; m < a.sampler.mixture_count(); ++m) {
      CHECK(std::fabs(a.sampler.weights()[m] - b.sampler.weights()[m]) <= 1e-12);
      for (std::size_t j = 0; j < 8; ++j) {
        CHECK(std::fabs(a.sampler.mixtures()[m].mean[j] - b.sampler.mixtures()[m].mean[j]) <=
              1e-12);
      }
      if (!a.sampler.mixtures()[m].isotropic) {
        CHECK((a.sampler.mixtures()[m].covariance - b.sampler.mixtures()[m].covariance)
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
      }
    }
    CHECK(b.provenance.source == "rt");
  }
  SUBCASE("empty database round trips") {
    const ExperienceDatabase db(8);
    save_db(db, path);
    const ExperienceDatabase loaded = load_db(path);
    CHECK(loaded.empty());
    CHECK(loaded.dof() == 8);
  }
  SUBCASE("weights that do not sum to 1 are rejected with the entry index") {
    std::ofstream out(path);
    out << R"({"format_version":1,"dof":2,"sigma":0.1,"distance_threshold":3.0,
      "entries":[{"descriptor":[1,0,1,3,0,1],
        "means":[[0.0,0.0],[1.0,1.0]],
        "covariances":[{"sigma":0.1},{"sigma":0.1}],
        "weights":[0.5,0.4]}]})";
    out.close();
    CHECK_THROWS_WITH_AS(load_db(path), doctest::Contains("entry 0"), DatabaseFormatError);
  }
  SUBCASE("malformed json is rejected") {
    std::ofstream out(path);
    out << "{ not json";
    out.close();
    CHECK_THROWS_AS(load_db(path), DatabaseFormatError);
  }
  SUBCASE("wrong format_version is rejected") {
    std::ofstream out(path);
    out << R"({"format_version":99,"dof":2,"entries":[]})";
    out.close();
    CHECK_THROWS_AS(load_db(path), DatabaseFormatError);
  }
  std::filesystem::remove(path);
}

TEST_CASE("create_gl_sampler end to end") {
  const ChainSpec chain = eight_link_chain();
  World world{chain, {{4.0, 0.0, 1.5}, {7.8, 0.0, 1.5}, {-20.0, 20.0, 1.0}}};

  ExperienceDatabase db(8);
  GlBuildOptions options;
  options.lambda = 0.5;
  options.build_on_miss = true;
  options.experience = fast_config();
  options.build_seed = 16;

  GlBuildReport report;
  const GlSampler sampler = create_gl_sampler(world, &db, options, &report);
  CHECK(report.primitive_count == 1);  // the isolated circle joins no pair
  CHECK(report.built == 1);
  CHECK(report.matched == 0);
  CHECK(sampler.has_global());
  CHECK(db.size() == 1);

  // Second build over the same world now hits the stored entry.
  GlBuildReport second;
  const GlSampler again = create_gl_sampler(world, &db, options, &second);
  CHECK(second.matched == 1);
  CHECK(second.built == 0);
  CHECK(again.has_global());

  // Without a database the sampler falls back to uniform.
  GlBuildReport none;
  const GlSampler uniform = create_gl_sampler(world, nullptr, options, &none);
  CHECK_FALSE(uniform.has_global());
  CHECK(uniform.effective_lambda() == 0.0);
}
