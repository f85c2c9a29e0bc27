#include "glplan/database.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace glplan {

using nlohmann::json;

namespace {

constexpr double kDedupDistance2 = 1e-6;

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ExperienceDatabase::ExperienceDatabase(int dof, double distance_threshold, double sigma)
    : dof_(dof), distance_threshold_(distance_threshold), sigma_(sigma) {
  if (dof_ < 1) throw std::invalid_argument("ExperienceDatabase: dof must be >= 1");
  if (distance_threshold_ <= 0.0) {
    throw std::invalid_argument("ExperienceDatabase: distance threshold must be > 0");
  }
}

void ExperienceDatabase::set_distance_threshold(double d) {
  if (d <= 0.0) throw std::invalid_argument("ExperienceDatabase: distance threshold must be > 0");
  distance_threshold_ = d;
}

void ExperienceDatabase::insert(DatabaseEntry entry) {
  for (DatabaseEntry& existing : entries_) {
    if (descriptor_distance2(existing.canonical_descriptor, entry.canonical_descriptor) <
        kDedupDistance2) {
      existing = std::move(entry);
      return;
    }
  }
  entries_.push_back(std::move(entry));
}

std::optional<ExperienceDatabase::Retrieval> ExperienceDatabase::retrieve(
    const LocalPrimitive& lw) const {
  if (entries_.empty()) return std::nullopt;
  const CanonicalPrimitive canonical = canonicalize(lw);
  const Descriptor query = canonical.primitive.descriptor();
  std::size_t best = 0;
  double best_dist2 = descriptor_distance2(entries_[0].canonical_descriptor, query);
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    const double d2 = descriptor_distance2(entries_[i].canonical_descriptor, query);
    if (d2 < best_dist2) {
      best_dist2 = d2;
      best = i;
    }
  }
  if (best_dist2 >= distance_threshold_) return std::nullopt;
  // The stored sampler lives in the canonical pose; rotating by -theta moves
  // it back into the query pose.
  return Retrieval{transform_sampler(entries_[best].sampler, -canonical.theta), best, best_dist2,
                   canonical.theta};
}

GmmSampler transform_sampler(const GmmSampler& g, double theta) {
  std::vector<Mixture> mixtures = g.mixtures();
  for (Mixture& m : mixtures) {
    if (m.mean.dof() == 0) continue;
    m.mean[0] = wrap_angle(m.mean[0] + theta);
  }
  return GmmSampler(std::move(mixtures), g.weights());
}

BuildEntryOutcome build_entry(const LocalPrimitive& lw, const ChainSpec& chain,
                              const ExperienceConfig& cfg, RandomStream& rng,
                              const std::string& source) {
  BuildEntryOutcome out;
  const LocalExperience experience = generate_local_experience(lw, chain, cfg, rng);
  if (experience.skipped()) {
    out.skip_reason = experience.skip_reason;
    return out;
  }
  const World world{chain, {lw.circle_a, lw.circle_b}};
  const std::vector<MergedClique> cliques =
      merge_cliques(experience.configs, world, cfg.motion_step, cfg.sigma);
  if (cliques.empty()) {
    out.skip_reason = "clique merge produced no mixtures";
    return out;
  }
  DatabaseEntry entry{lw.descriptor(), sampler_from_cliques(cliques, cfg.sigma),
                      Provenance{source, utc_now(), static_cast<int>(experience.configs.size()),
                                 static_cast<int>(cliques.size())}};
  out.entry = std::move(entry);
  return out;
}

namespace {

json mixture_covariance_to_json(const Mixture& m) {
  if (m.isotropic) return json{{"sigma", m.sigma}};
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.covariance.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.covariance.cols(); ++j) row.push_back(m.covariance(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"matrix", std::move(rows)}};
}

json entry_to_json(const DatabaseEntry& e) {
  json means = json::array();
  json covariances = json::array();
  for (const Mixture& m : e.sampler.mixtures()) {
    means.push_back(m.mean.angles);
    covariances.push_back(mixture_covariance_to_json(m));
  }
  return json{{"descriptor", e.canonical_descriptor},
              {"means", std::move(means)},
              {"covariances", std::move(covariances)},
              {"weights", e.sampler.weights()},
              {"provenance",
               {{"source", e.provenance.source},
                {"created", e.provenance.created},
                {"configs_before_merge", e.provenance.configs_before_merge},
                {"configs_after_merge", e.provenance.configs_after_merge}}}};
}

DatabaseEntry entry_from_json(const json& j, int dof, std::size_t index) {
  const auto fail = [&](const std::string& what) {
    throw DatabaseFormatError("database entry " + std::to_string(index) + ": " + what);
  };
  try {
    const auto desc = j.at("descriptor").get<std::vector<double>>();
    if (desc.size() != 6) fail("descriptor must have 6 values");
    Descriptor descriptor;
    std::copy(desc.begin(), desc.end(), descriptor.begin());

    const auto means = j.at("means").get<std::vector<std::vector<double>>>();
    const auto weights = j.at("weights").get<std::vector<double>>();
    const json& covs = j.at("covariances");
    if (means.size() != covs.size()) fail("means/covariances count mismatch");

    std::vector<Mixture> mixtures;
    mixtures.reserve(means.size());
    for (std::size_t m = 0; m < means.size(); ++m) {
      if (means[m].size() != static_cast<std::size_t>(dof)) {
        fail("mean " + std::to_string(m) + " has wrong dimension");
      }
      Configuration mean(means[m]);
      const json& cov = covs[m];
      if (cov.contains("sigma")) {
        mixtures.push_back(Mixture::with_sigma(std::move(mean), cov.at("sigma").get<double>()));
      } else if (cov.contains("matrix")) {
        const auto rows = cov.at("matrix").get<std::vector<std::vector<double>>>();
        Eigen::MatrixXd matrix(dof, dof);
        if (rows.size() != static_cast<std::size_t>(dof)) {
          fail("covariance matrix " + std::to_string(m) + " has wrong dimension");
        }
        for (int r = 0; r < dof; ++r) {
          if (rows[r].size() != static_cast<std::size_t>(dof)) {
            fail("covariance matrix " + std::to_string(m) + " has wrong dimension");
          }
          for (int c = 0; c < dof; ++c) matrix(r, c) = rows[r][c];
        }
        mixtures.push_back(Mixture::with_covariance(std::move(mean), std::move(matrix)));
      } else {
        fail("covariance " + std::to_string(m) + " needs either sigma or matrix");
      }
    }

    Provenance provenance;
    if (j.contains("provenance")) {
      const json& p = j.at("provenance");
      provenance.source = p.value("source", "");
      provenance.created = p.value("created", "");
      provenance.configs_before_merge = p.value("configs_before_merge", 0);
      provenance.configs_after_merge = p.value("configs_after_merge", 0);
    }
    // GmmSampler construction enforces the sampler invariants.
    return DatabaseEntry{descriptor, GmmSampler(std::move(mixtures), weights), provenance};
  } catch (const DatabaseFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw DatabaseFormatError("database entry " + std::to_string(index) + ": " + e.what());
  }
}

}  // namespace

void save_db(const ExperienceDatabase& db, const std::string& path) {
  json doc{{"format_version", 1},
           {"dof", db.dof()},
           {"sigma", db.sigma()},
           {"distance_threshold", db.distance_threshold()},
           {"entries", json::array()}};
  for (const DatabaseEntry& e : db.entries()) doc["entries"].push_back(entry_to_json(e));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_db: cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("save_db: write failed for " + path);
}

ExperienceDatabase load_db(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatabaseFormatError("load_db: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw DatabaseFormatError("load_db: " + path + ": " + e.what());
  }
  if (!doc.is_object() || doc.value("format_version", 0) != 1) {
    throw DatabaseFormatError("load_db: " + path + ": unsupported format_version");
  }
  const int dof = doc.value("dof", 0);
  if (dof < 1) throw DatabaseFormatError("load_db: " + path + ": missing or invalid dof");
  ExperienceDatabase db(dof, doc.value("distance_threshold", kDefaultDistanceThreshold),
                        doc.value("sigma", kDefaultSigma));
  const json entries = doc.value("entries", json::array());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    db.insert(entry_from_json(entries[i], dof, i));
  }
  return db;
}

GridSpec load_grid_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_grid_spec: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error("load_grid_spec: " + path + ": " + e.what());
  }
  if (doc.value("format_version", 0) != 1) {
    throw std::runtime_error("load_grid_spec: " + path + ": unsupported format_version");
  }
  GridSpec spec;
  const auto range = [&](const char* key, double& lo, double& hi) {
    if (!doc.contains(key)) return;
    lo = doc.at(key).at("min").get<double>();
    hi = doc.at(key).at("max").get<double>();
    if (lo > hi) throw std::runtime_error(std::string("load_grid_spec: ") + key + ": min > max");
  };
  const auto& chain = doc.at("chain");
  const auto base = chain.at("base").get<std::vector<double>>();
  spec.chain.base_x = base.at(0);
  spec.chain.base_y = base.at(1);
  spec.chain.link_lengths = chain.at("link_lengths").get<std::vector<double>>();
  spec.chain.joint_limits.assign(spec.chain.link_lengths.size(), JointLimits{});
  spec.chain.self_collision_enabled = chain.value("self_collision", true);
  range("da", spec.da_min, spec.da_max);
  range("ra", spec.ra_min, spec.ra_max);
  range("rb", spec.rb_min, spec.rb_max);
  range("xb", spec.xb_min, spec.xb_max);
  range("yb", spec.yb_min, spec.yb_max);
  range("gap", spec.gap_min, spec.gap_max);
  spec.pitch_scale = doc.value("pitch_scale", 1.0);
  spec.name = doc.value("name", std::string("grid"));
  return spec;
}

double grid_pitch(double distance_threshold, double pitch_scale) {
  return 2.0 * std::sqrt(distance_threshold / 5.0) * pitch_scale;
}

std::vector<LocalPrimitive> enumerate_grid(const GridSpec& spec, double distance_threshold) {
  const double pitch = grid_pitch(distance_threshold, spec.pitch_scale);
  const double reach = spec.chain.reach();
  std::vector<LocalPrimitive> primitives;
  const auto steps = [&](double lo, double hi) {
    return static_cast<int>(std::floor((hi - lo) / pitch + 1e-9)) + 1;
  };
  for (int ida = 0; ida < steps(spec.da_min, spec.da_max); ++ida) {
    const double da = spec.da_min + ida * pitch;
    for (int ira = 0; ira < steps(spec.ra_min, spec.ra_max); ++ira) {
      const double ra = spec.ra_min + ira * pitch;
      for (int ixb = 0; ixb < steps(spec.xb_min, spec.xb_max); ++ixb) {
        const double xb = spec.xb_min + ixb * pitch;
        for (int iyb = 0; iyb < steps(spec.yb_min, spec.yb_max); ++iyb) {
          const double yb = spec.yb_min + iyb * pitch;
          for (int irb = 0; irb < steps(spec.rb_min, spec.rb_max); ++irb) {
            const double rb = spec.rb_min + irb * pitch;
            const Circle a{da, 0.0, ra};
            const Circle b{xb, yb, rb};
            const double gap = surface_gap(a, b);
            if (gap < spec.gap_min || gap > spec.gap_max) continue;
            if (da - ra > reach) continue;  // entirely out of reach
            const LocalPrimitive lp = make_primitive(a, b);
            // Only keep points already in canonical order; the swapped pose
            // is a different lattice point.
            if (lp.circle_a.cx != da || lp.circle_a.cy != 0.0 || lp.circle_a.r != ra) continue;
            primitives.push_back(lp);
          }
        }
      }
    }
  }
  return primitives;
}

GlSampler create_gl_sampler(const World& world, ExperienceDatabase* db,
                            const GlBuildOptions& options, GlBuildReport* report) {
  GlBuildReport local_report;
  GlBuildReport& rep = report ? *report : local_report;
  rep = GlBuildReport{};

  const std::vector<LocalPrimitive> primitives = decompose(world, options.gap_threshold);
  rep.primitive_count = static_cast<int>(primitives.size());
  std::vector<GmmSampler> locals;
  if (db != nullptr) {
    RandomStream build_rng(options.build_seed);
    const auto wall_start = std::chrono::steady_clock::now();
    for (const LocalPrimitive& lw : primitives) {
      rep.retrieve_ops += db->size();
      if (auto hit = db->retrieve(lw)) {
        ++rep.matched;
        locals.push_back(std::move(hit->sampler));
        continue;
      }
      if (!options.build_on_miss) {
        rep.notes.push_back("no database entry within threshold for a primitive; skipped");
        ++rep.skipped;
        continue;
      }
      const CanonicalPrimitive canonical = canonicalize(lw);
      BuildEntryOutcome built = build_entry(canonical.primitive, world.chain, options.experience,
                                            build_rng, "built-on-miss");
      if (!built.entry) {
        rep.notes.push_back("primitive skipped: " + built.skip_reason);
        ++rep.skipped;
        continue;
      }
      locals.push_back(transform_sampler(built.entry->sampler, -canonical.theta));
      db->insert(std::move(*built.entry));
      ++rep.built;
    }
    rep.retrieve_wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start)
            .count();
  } else if (!primitives.empty()) {
    rep.notes.push_back("no database given; sampling uniformly");
    rep.skipped = rep.primitive_count;
  }

  if (locals.empty()) {
    return GlSampler(std::nullopt, options.lambda, world.chain.joint_limits);
  }
  return GlSampler(SynthesizedSampler(std::move(locals)), options.lambda,
                   world.chain.joint_limits);
}

}  // namespace glplan
