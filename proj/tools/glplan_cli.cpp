// glplan: experience-guided sampling for planar-chain motion planning.
//
// Subcommands:
//   build-db   precompute local samplers from scenarios or a primitive grid
//   plan       solve one scenario query with uniform or gl sampling
//   bench      sweep (scenario x planner x sampler x seed) cells to CSV
//   render     draw a scenario (and optionally a path / sample set) to SVG

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "glplan/bench.hpp"
#include "glplan/database.hpp"
#include "glplan/planner.hpp"
#include "glplan/scenario.hpp"
#include "glplan/svg.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitTimeout = 3;

struct SharedFlags {
  std::uint64_t seed = 0;
  double lambda = glplan::kDefaultLambda;
  double sigma = glplan::kDefaultSigma;
  double threshold_d = glplan::kDefaultDistanceThreshold;
  double timeout_s = 30.0;
  std::string db_path;
  std::string out_path;
};

void add_shared_flags(CLI::App* cmd, SharedFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Base random seed");
  cmd->add_option("--lambda", flags.lambda, "Biased-sampling probability")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--sigma", flags.sigma, "Isotropic mixture standard deviation (rad)");
  cmd->add_option("--threshold-d", flags.threshold_d, "Squared-descriptor retrieval threshold");
  cmd->add_option("--timeout", flags.timeout_s, "Planning budget in model seconds");
  cmd->add_option("--db", flags.db_path, "Experience database file");
  cmd->add_option("--out", flags.out_path, "Output file");
}

void add_experience_flags(CLI::App* cmd, glplan::ExperienceConfig& cfg) {
  cmd->add_option("--runs-per-query", cfg.runs_per_query)->check(CLI::PositiveNumber);
  cmd->add_option("--queries-per-primitive", cfg.queries_per_primitive)->check(CLI::PositiveNumber);
  cmd->add_option("--shortcut-iterations", cfg.shortcut_iterations)->check(CLI::PositiveNumber);
  cmd->add_option("--dedup-radius", cfg.dedup_radius);
  cmd->add_option("--gap-inflation", cfg.gap_region_inflation);
  cmd->add_option("--clearance", cfg.clearance_radius);
  cmd->add_option("--gen-timeout", cfg.gen_timeout_s, "Per-training-solve budget (model s)");
}

int run_build_db(const SharedFlags& flags, const std::vector<std::string>& scenario_paths,
                 const std::string& grid_path, glplan::ExperienceConfig exp) {
  using namespace glplan;
  exp.sigma = flags.sigma;
  if (flags.out_path.empty()) {
    std::cerr << "build-db: --out is required\n";
    return kExitInputError;
  }
  if (scenario_paths.empty() && grid_path.empty()) {
    std::cerr << "build-db: give at least one --scenario or a --grid spec\n";
    return kExitInputError;
  }

  // (canonical primitive, source) work list
  std::vector<std::pair<LocalPrimitive, std::string>> jobs;
  int dof = 0;
  ChainSpec chain;
  for (const std::string& path : scenario_paths) {
    const Scenario scenario = load_scenario(path);
    ChainSpec local = scenario.chain;
    local.base_x = 0.0;
    local.base_y = 0.0;  // primitives live in the base frame
    if (dof == 0) {
      dof = static_cast<int>(local.dof());
      chain = local;
    } else if (static_cast<int>(local.dof()) != dof) {
      std::cerr << "build-db: scenario " << path << " has a different chain DOF\n";
      return kExitInputError;
    }
    const auto primitives = decompose(scenario.world(), scenario.gap_threshold);
    if (primitives.empty()) {
      std::cerr << "warning: " << path << ": no close obstacle pairs, nothing to learn\n";
    }
    for (const LocalPrimitive& lw : primitives) {
      jobs.emplace_back(canonicalize(lw).primitive, scenario.name);
    }
  }
  if (!grid_path.empty()) {
    const GridSpec grid = load_grid_spec(grid_path);
    if (dof == 0) {
      dof = static_cast<int>(grid.chain.dof());
      chain = grid.chain;
    } else if (static_cast<int>(grid.chain.dof()) != dof) {
      std::cerr << "build-db: grid chain DOF differs from scenario chain DOF\n";
      return kExitInputError;
    }
    for (const LocalPrimitive& lw : enumerate_grid(grid, flags.threshold_d)) {
      jobs.emplace_back(lw, grid.name);
    }
  }

  ExperienceDatabase db(dof, flags.threshold_d, flags.sigma);
  RandomStream rng(flags.seed);
  int built = 0;
  int skipped = 0;
  for (const auto& [lw, source] : jobs) {
    const BuildEntryOutcome outcome = build_entry(lw, chain, exp, rng, source);
    if (!outcome.entry) {
      ++skipped;
      std::cerr << "warning: primitive from " << source << " skipped: " << outcome.skip_reason
                << "\n";
      continue;
    }
    std::printf("entry %3d  source=%s  configs %d -> mixtures %d\n", built,
                source.c_str(), outcome.entry->provenance.configs_before_merge,
                outcome.entry->provenance.configs_after_merge);
    db.insert(std::move(*outcome.entry));
    ++built;
  }
  save_db(db, flags.out_path);
  std::printf("database: %zu entries (%d built, %d skipped) -> %s\n", db.size(), built, skipped,
              flags.out_path.c_str());
  if (db.empty()) std::cerr << "warning: database is empty\n";
  return kExitOk;
}

int run_plan(const SharedFlags& flags, const std::string& scenario_path,
             const std::string& planner_name, const std::string& sampler_name, bool build_on_miss,
             const glplan::PlannerConfig& planner_flags, glplan::ExperienceConfig exp,
             const std::string& path_out, const std::string& svg_out) {
  using namespace glplan;
  const Scenario scenario = load_scenario(scenario_path);

  PlannerConfig cfg = planner_flags;
  cfg.kind = planner_kind_from_string(planner_name);
  cfg.lambda = flags.lambda;
  cfg.timeout_s = flags.timeout_s;
  cfg.rng_seed = flags.seed;

  std::optional<ExperienceDatabase> db;
  std::optional<GlSampler> sampler;
  GlBuildReport report;
  if (sampler_name == "gl") {
    if (flags.db_path.empty()) {
      std::cerr << "plan: --sampler gl needs --db\n";
      return kExitInputError;
    }
    db = load_db(flags.db_path);
    db->set_distance_threshold(flags.threshold_d);
    if (db->dof() != static_cast<int>(scenario.chain.dof())) {
      std::cerr << "plan: database DOF " << db->dof() << " does not match the scenario chain\n";
      return kExitInputError;
    }
    GlBuildOptions options;
    options.lambda = flags.lambda;
    options.gap_threshold = scenario.gap_threshold;
    options.build_on_miss = build_on_miss;
    exp.sigma = flags.sigma;
    options.experience = exp;
    options.build_seed = flags.seed;
    sampler = create_gl_sampler(scenario.world(), &*db, options, &report);
    for (const std::string& note : report.notes) std::cerr << "warning: " << note << "\n";
    if (build_on_miss && report.built > 0) save_db(*db, flags.db_path);
    if (!sampler->has_global()) {
      std::cerr << "warning: no local sampler matched; planning with uniform sampling\n";
    }
    std::printf("gl-sampler: %d primitives, %d matched, %d built, %d skipped\n",
                report.primitive_count, report.matched, report.built, report.skipped);
    std::printf("retrieval: %.3f ms wall, %.6f ms model\n", report.retrieve_wall_ms,
                report.retrieve_model_ms());
  } else if (sampler_name == "uniform") {
    sampler = GlSampler::uniform_only(scenario.chain.joint_limits);
  } else {
    std::cerr << "plan: unknown sampler '" << sampler_name << "'\n";
    return kExitInputError;
  }

  const PlanResult result = plan(scenario.world(), scenario.start, scenario.goal, *sampler, cfg);
  std::printf("%s: %s in %.3f model s (%.3f wall s), %llu iterations, %llu nodes, %llu biased\n",
              scenario.name.c_str(), result.solved() ? "solved" : "timeout", result.elapsed_s,
              result.wall_s, static_cast<unsigned long long>(result.iterations),
              static_cast<unsigned long long>(result.valid_sample_count),
              static_cast<unsigned long long>(result.biased_sample_count));
  if (result.path) {
    std::printf("path: %zu waypoints, length %.3f rad\n", result.path->waypoints.size(),
                path_length(*result.path, scenario.chain.joint_limits));
    if (!path_out.empty()) save_path_file(*result.path, path_out);
  }
  if (!svg_out.empty()) {
    write_svg(render_scenario_svg(scenario, result.path ? &*result.path : nullptr), svg_out);
  }
  return result.solved() ? kExitOk : kExitTimeout;
}

int run_bench(const SharedFlags& flags, const std::string& spec_path, int workers) {
  using namespace glplan;
  if (flags.out_path.empty()) {
    std::cerr << "bench: --out is required\n";
    return kExitInputError;
  }
  const BenchmarkSpec spec = load_bench_spec(spec_path);
  const std::vector<BenchmarkRow> rows = run_benchmark(spec, workers);
  write_csv(rows, flags.out_path);
  int errors = 0;
  for (const BenchmarkRow& row : rows) {
    if (!row.error.empty()) {
      ++errors;
      std::cerr << "error: " << row.scenario << " " << row.planner << "-" << row.sampler
                << " seed " << row.seed << ": " << row.error << "\n";
    }
  }
  std::cout << summarize_rows(rows);
  std::printf("%zu rows -> %s\n", rows.size(), flags.out_path.c_str());
  return errors == 0 ? kExitOk : kExitInputError;
}

int run_render(const SharedFlags& flags, const std::string& scenario_path,
               const std::string& path_file, const std::string& samples_file) {
  using namespace glplan;
  if (flags.out_path.empty()) {
    std::cerr << "render: --out is required\n";
    return kExitInputError;
  }
  const Scenario scenario = load_scenario(scenario_path);
  std::optional<Path> path;
  if (!path_file.empty()) path = load_path_file(path_file);
  std::optional<std::vector<Configuration>> samples;
  if (!samples_file.empty()) samples = load_config_set(samples_file);
  write_svg(render_scenario_svg(scenario, path ? &*path : nullptr, samples ? &*samples : nullptr),
            flags.out_path);
  std::printf("rendered %s -> %s\n", scenario.name.c_str(), flags.out_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experience-guided sampling toolkit for planar-chain motion planning"};
  app.require_subcommand(1);

  SharedFlags build_flags, plan_flags, bench_flags, render_flags;
  glplan::ExperienceConfig build_exp, plan_exp;
  glplan::PlannerConfig planner_flags;

  // build-db
  auto* build = app.add_subcommand("build-db", "Precompute the local sampler database");
  std::vector<std::string> build_scenarios;
  std::string build_grid;
  build->add_option("--scenario", build_scenarios, "Scenario file(s) to learn from");
  build->add_option("--grid", build_grid, "Primitive grid spec file");
  add_shared_flags(build, build_flags);
  add_experience_flags(build, build_exp);

  // plan
  auto* planc = app.add_subcommand("plan", "Solve one scenario query");
  std::string plan_scenario, plan_planner = "birrt", plan_sampler = "uniform";
  std::string plan_path_out, plan_svg_out;
  bool build_on_miss = false;
  planc->add_option("--scenario", plan_scenario, "Scenario file")->required();
  planc->add_option("--planner", plan_planner, "rrt | birrt | prm");
  planc->add_option("--sampler", plan_sampler, "uniform | gl");
  planc->add_flag("--build-on-miss", build_on_miss,
                  "Build and store missing local samplers during retrieval");
  planc->add_option("--path-out", plan_path_out, "Write the solved path (waypoint JSON)");
  planc->add_option("--svg-out", plan_svg_out, "Render the scenario and path to SVG");
  planc->add_option("--rrt-step", planner_flags.rrt_step, "Steer distance (rad, max-norm)");
  planc->add_option("--goal-bias", planner_flags.rrt_goal_bias);
  planc->add_option("--prm-batch", planner_flags.prm_batch);
  planc->add_option("--prm-k", planner_flags.prm_k_neighbors);
  planc->add_option("--motion-step", planner_flags.motion_step);
  add_shared_flags(planc, plan_flags);
  add_experience_flags(planc, plan_exp);

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep to CSV");
  std::string bench_spec;
  int bench_workers = 0;
  bench->add_option("--spec", bench_spec, "Benchmark spec file")->required();
  bench->add_option("--workers", bench_workers, "Worker threads (default: hardware)");
  add_shared_flags(bench, bench_flags);

  // render
  auto* render = app.add_subcommand("render", "Render a scenario to SVG");
  std::string render_scenario, render_path, render_samples;
  render->add_option("--scenario", render_scenario, "Scenario file")->required();
  render->add_option("--path", render_path, "Path file to overlay");
  render->add_option("--samples", render_samples, "Configuration set to scatter");
  add_shared_flags(render, render_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return run_build_db(build_flags, build_scenarios, build_grid, build_exp);
    if (planc->parsed()) {
      return run_plan(plan_flags, plan_scenario, plan_planner, plan_sampler, build_on_miss,
                      planner_flags, plan_exp, plan_path_out, plan_svg_out);
    }
    if (bench->parsed()) return run_bench(bench_flags, bench_spec, bench_workers);
    if (render->parsed()) {
      return run_render(render_flags, render_scenario, render_path, render_samples);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
