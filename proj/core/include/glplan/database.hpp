#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glplan/experience.hpp"
#include "glplan/sampling.hpp"
#include "glplan/workspace.hpp"

namespace glplan {

struct Provenance {
  std::string source;   // scenario id or grid spec name
  std::string created;  // ISO-8601 UTC timestamp
  int configs_before_merge = 0;
  int configs_after_merge = 0;
};

/// A stored local sampler keyed by its canonical primitive descriptor.
struct DatabaseEntry {
  Descriptor canonical_descriptor{};
  GmmSampler sampler;
  Provenance provenance;
};

/// Raised by load_db on malformed files; message names the offending entry.
struct DatabaseFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Persistent map from canonical primitives to GMM local samplers.
class ExperienceDatabase {
 public:
  explicit ExperienceDatabase(int dof, double distance_threshold = kDefaultDistanceThreshold,
                              double sigma = kDefaultSigma);

  int dof() const { return dof_; }
  double distance_threshold() const { return distance_threshold_; }
  void set_distance_threshold(double d);
  double sigma() const { return sigma_; }
  const std::vector<DatabaseEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  /// Inserts an entry; an existing entry within squared descriptor distance
  /// 1e-6 is replaced instead of duplicated.
  void insert(DatabaseEntry entry);

  struct Retrieval {
    GmmSampler sampler;  // already rotated into the query pose
    std::size_t entry_index = 0;
    double distance2 = 0.0;
    double theta = 0.0;  // canonicalization angle of the query
  };

  /// Canonicalizes the query primitive, finds the nearest stored descriptor
  /// (ties to the lowest index), and returns its sampler rotated back into
  /// the query pose iff the squared distance is below the threshold.
  std::optional<Retrieval> retrieve(const LocalPrimitive& lw) const;

 private:
  int dof_;
  double distance_threshold_;
  double sigma_;
  std::vector<DatabaseEntry> entries_;
};

/// Rotational experience transfer: shifts every mean's first joint by theta
/// (wrapped); covariances and weights are untouched. Sound because rotating
/// joint 1 rotates the whole chain about its fixed base.
GmmSampler transform_sampler(const GmmSampler& g, double theta);

/// Builds one database entry for a canonical-pose primitive: generate
/// experiences, merge cliques, fit the mixture. nullopt with skip_reason set
/// when the primitive is skipped (e.g. unreachable gap).
struct BuildEntryOutcome {
  std::optional<DatabaseEntry> entry;
  std::string skip_reason;
};
BuildEntryOutcome build_entry(const LocalPrimitive& lw, const ChainSpec& chain,
                              const ExperienceConfig& cfg, RandomStream& rng,
                              const std::string& source = "");

void save_db(const ExperienceDatabase& db, const std::string& path);
ExperienceDatabase load_db(const std::string& path);

/// Everything cmd-plan needs to know about how the sampler was assembled.
struct GlBuildReport {
  int primitive_count = 0;
  int matched = 0;
  int built = 0;
  int skipped = 0;
  double retrieve_wall_ms = 0.0;
  std::uint64_t retrieve_ops = 0;  // descriptor distance evaluations
  std::vector<std::string> notes;

  double retrieve_model_ms() const {
    return static_cast<double>(retrieve_ops) / kWorkUnitsPerSecond * 1000.0;
  }
};

struct GlBuildOptions {
  double lambda = kDefaultLambda;
  double gap_threshold = kDefaultGapThreshold;
  bool build_on_miss = false;
  ExperienceConfig experience;  // used when building on miss
  std::uint64_t build_seed = 0;
};

/// Decomposes the world, retrieves (or optionally builds) a local sampler per
/// primitive, and synthesizes the lambda-mixed sampler. Falls back to a pure
/// uniform sampler when nothing matches. db may be null (uniform only).
GlSampler create_gl_sampler(const World& world, ExperienceDatabase* db,
                            const GlBuildOptions& options, GlBuildReport* report = nullptr);

/// Regular lattice over the canonical primitive space (circle_a distance and
/// radius, circle_b center and radius) for offline database precomputation.
struct GridSpec {
  ChainSpec chain;
  double da_min = 2.0, da_max = 6.0;  // circle_a center distance from base
  double ra_min = 1.0, ra_max = 2.0;
  double rb_min = 1.0, rb_max = 2.0;
  double xb_min = 0.0, xb_max = 8.0;  // circle_b center, canonical frame
  double yb_min = -8.0, yb_max = 8.0;
  double gap_min = 0.05;
  double gap_max = kDefaultGapThreshold;
  double pitch_scale = 1.0;
  std::string name = "grid";
};

GridSpec load_grid_spec(const std::string& path);

/// Lattice pitch such that any in-range canonical primitive lies within the
/// retrieval threshold of some lattice point: the 5 effective coordinates at
/// pitch p put a query at squared distance at most 5*(p/2)^2.
double grid_pitch(double distance_threshold, double pitch_scale = 1.0);

/// All canonical-pose lattice primitives within the spec ranges whose surface
/// gap falls in [gap_min, gap_max], skipping points that are not in canonical
/// order or sit entirely beyond the chain's reach.
std::vector<LocalPrimitive> enumerate_grid(const GridSpec& spec, double distance_threshold);

}  // namespace glplan
