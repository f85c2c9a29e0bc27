#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glplan/database.hpp"
#include "glplan/planner.hpp"
#include "glplan/scenario.hpp"

namespace glplan {

/// One benchmark sweep: every (scenario x planner x sampler) cell is run with
/// seeds seed_base .. seed_base+runs-1.
struct BenchmarkSpec {
  std::vector<std::string> scenario_paths;
  std::vector<PlannerKind> planners;
  std::vector<std::string> samplers;  // "uniform" and/or "gl"
  int runs = 20;
  double timeout_s = 30.0;
  double lambda = kDefaultLambda;
  double sigma = kDefaultSigma;
  std::uint64_t seed_base = 1;
  std::string db_path;             // required when "gl" is requested
  PlannerConfig planner_defaults;  // step sizes etc.; kind/seed set per cell
};

BenchmarkSpec load_bench_spec(const std::string& path);

struct BenchmarkRow {
  std::string scenario;
  std::string planner;
  std::string sampler;
  std::uint64_t seed = 0;
  std::string outcome;  // solved | timeout | error
  double elapsed_s = 0.0;
  std::uint64_t iterations = 0;
  double path_length_rad = -1.0;  // < 0 means no path; empty CSV field
  double db_retrieve_ms = 0.0;    // deterministic model latency
  std::string error;              // console only, never in the CSV
};

inline constexpr const char* kCsvHeader =
    "scenario,planner,sampler,seed,outcome,elapsed_s,iterations,path_length_rad,db_retrieve_ms";

/// Runs the sweep on a worker pool. Rows come back ordered by
/// (scenario, planner, sampler, seed) regardless of completion order, and the
/// run is deterministic: identical specs give identical rows.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkSpec& spec, int workers = 0);

std::string rows_to_csv(const std::vector<BenchmarkRow>& rows);
void write_csv(const std::vector<BenchmarkRow>& rows, const std::string& path);

/// Per-cell success rate and elapsed-time stats, for the console.
std::string summarize_rows(const std::vector<BenchmarkRow>& rows);

}  // namespace glplan
