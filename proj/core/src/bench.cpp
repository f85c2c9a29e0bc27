#include "glplan/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <thread>

namespace glplan {

using nlohmann::json;

BenchmarkSpec load_bench_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("load_bench_spec: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ScenarioError("load_bench_spec: " + path + ": " + e.what());
  }
  if (doc.value("format_version", 0) != 1) {
    throw ScenarioError("load_bench_spec: " + path + ": unsupported format_version");
  }
  BenchmarkSpec spec;
  try {
    spec.scenario_paths = doc.at("scenarios").get<std::vector<std::string>>();
    for (const auto& p : doc.at("planners").get<std::vector<std::string>>()) {
      spec.planners.push_back(planner_kind_from_string(p));
    }
    spec.samplers = doc.at("samplers").get<std::vector<std::string>>();
    for (const auto& s : spec.samplers) {
      if (s != "uniform" && s != "gl") {
        throw ScenarioError("load_bench_spec: unknown sampler '" + s + "'");
      }
    }
    spec.runs = doc.value("runs", 20);
    if (spec.runs < 1) throw ScenarioError("load_bench_spec: runs must be >= 1");
    spec.timeout_s = doc.value("timeout_s", 30.0);
    spec.lambda = doc.value("lambda", kDefaultLambda);
    spec.sigma = doc.value("sigma", kDefaultSigma);
    spec.seed_base = doc.value("seed_base", std::uint64_t{1});
    spec.db_path = doc.value("db", "");
    if (doc.contains("planner_config")) {
      const json& pc = doc.at("planner_config");
      spec.planner_defaults.rrt_step = pc.value("rrt_step", spec.planner_defaults.rrt_step);
      spec.planner_defaults.rrt_goal_bias =
          pc.value("rrt_goal_bias", spec.planner_defaults.rrt_goal_bias);
      spec.planner_defaults.prm_batch = pc.value("prm_batch", spec.planner_defaults.prm_batch);
      spec.planner_defaults.prm_k_neighbors =
          pc.value("prm_k_neighbors", spec.planner_defaults.prm_k_neighbors);
      spec.planner_defaults.motion_step =
          pc.value("motion_step", spec.planner_defaults.motion_step);
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError("load_bench_spec: " + path + ": " + e.what());
  }
  // Relative scenario/db paths are taken relative to the spec file.
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  const auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).string();
  };
  for (std::string& p : spec.scenario_paths) resolve(p);
  resolve(spec.db_path);
  return spec;
}

namespace {

struct Cell {
  std::size_t scenario_index;
  PlannerKind planner;
  bool use_gl;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkSpec& spec, int workers) {
  const bool wants_gl =
      std::find(spec.samplers.begin(), spec.samplers.end(), "gl") != spec.samplers.end();
  if (wants_gl && spec.db_path.empty()) {
    throw ScenarioError("run_benchmark: gl sampler requested but no database given");
  }

  std::vector<Scenario> scenarios;
  scenarios.reserve(spec.scenario_paths.size());
  for (const std::string& p : spec.scenario_paths) scenarios.push_back(load_scenario(p));

  ExperienceDatabase db(1);
  if (wants_gl) db = load_db(spec.db_path);

  // The GL sampler for a scenario depends only on the world and the database;
  // build it once per scenario and share it read-only across runs.
  std::vector<GlSampler> gl_samplers;
  std::vector<double> gl_retrieve_ms(scenarios.size(), 0.0);
  if (wants_gl) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      GlBuildOptions options;
      options.lambda = spec.lambda;
      options.gap_threshold = scenarios[i].gap_threshold;
      options.build_on_miss = false;
      GlBuildReport report;
      gl_samplers.push_back(create_gl_sampler(scenarios[i].world(), &db, options, &report));
      gl_retrieve_ms[i] = report.retrieve_model_ms();
    }
  }

  std::vector<Cell> cells;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    for (PlannerKind planner : spec.planners) {
      for (const std::string& sampler : spec.samplers) {
        cells.push_back({s, planner, sampler == "gl"});
      }
    }
  }

  const std::size_t total = cells.size() * static_cast<std::size_t>(spec.runs);
  std::vector<BenchmarkRow> rows(total);
  std::atomic<std::size_t> next{0};

  const auto run_task = [&](std::size_t task) {
    const Cell& cell = cells[task / spec.runs];
    const int run = static_cast<int>(task % spec.runs);
    const Scenario& scenario = scenarios[cell.scenario_index];
    const std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(run);

    BenchmarkRow& row = rows[task];
    row.scenario = scenario.name;
    row.planner = to_string(cell.planner);
    row.sampler = cell.use_gl ? "gl" : "uniform";
    row.seed = seed;
    row.db_retrieve_ms = cell.use_gl ? gl_retrieve_ms[cell.scenario_index] : 0.0;

    PlannerConfig cfg = spec.planner_defaults;
    cfg.kind = cell.planner;
    cfg.lambda = spec.lambda;
    cfg.timeout_s = spec.timeout_s;
    cfg.rng_seed = seed;

    try {
      std::optional<GlSampler> local;
      if (!cell.use_gl) local.emplace(GlSampler::uniform_only(scenario.chain.joint_limits));
      const GlSampler& sampler = cell.use_gl ? gl_samplers[cell.scenario_index] : *local;
      const PlanResult result = plan(scenario.world(), scenario.start, scenario.goal, sampler, cfg);
      row.outcome = result.solved() ? "solved" : "timeout";
      row.elapsed_s = result.elapsed_s;
      row.iterations = result.iterations;
      if (result.path) row.path_length_rad = path_length(*result.path, scenario.chain.joint_limits);
    } catch (const std::exception& e) {
      row.outcome = "error";
      row.error = e.what();
    }
  };

  int pool = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  pool = std::max(1, std::min<int>(pool, static_cast<int>(total)));
  if (pool == 1) {
    for (std::size_t t = 0; t < total; ++t) run_task(t);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(pool));
    for (int w = 0; w < pool; ++w) {
      threads.emplace_back([&] {
        for (std::size_t t = next.fetch_add(1); t < total; t = next.fetch_add(1)) run_task(t);
      });
    }
    for (std::thread& t : threads) t.join();
  }
  return rows;
}

std::string rows_to_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const BenchmarkRow& r : rows) {
    out << r.scenario << ',' << r.planner << ',' << r.sampler << ',' << r.seed << ',' << r.outcome
        << ',' << format_double(r.elapsed_s) << ',' << r.iterations << ',';
    if (r.path_length_rad >= 0.0) out << format_double(r.path_length_rad);
    out << ',' << format_double(r.db_retrieve_ms) << '\n';
  }
  return out.str();
}

void write_csv(const std::vector<BenchmarkRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot write " + path);
  out << rows_to_csv(rows);
}

std::string summarize_rows(const std::vector<BenchmarkRow>& rows) {
  struct CellStats {
    int runs = 0;
    int solved = 0;
    std::vector<double> times;
  };
  std::map<std::string, CellStats> cells;
  for (const BenchmarkRow& r : rows) {
    CellStats& c = cells[r.scenario + " " + r.planner + "-" + r.sampler];
    ++c.runs;
    if (r.outcome == "solved") ++c.solved;
    c.times.push_back(r.elapsed_s);
  }
  std::ostringstream out;
  for (auto& [name, c] : cells) {
    std::sort(c.times.begin(), c.times.end());
    const double median = c.times[c.times.size() / 2];
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-40s success %2d/%2d  time med/min/max %.3f/%.3f/%.3f s",
                  name.c_str(), c.solved, c.runs, median, c.times.front(), c.times.back());
    out << buf << '\n';
  }
  return out.str();
}

}  // namespace glplan
