#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrgp/djss.hpp"
#include "mrgp/engine.hpp"
#include "mrgp/symreg.hpp"

namespace mrgp {

struct ExperimentSpec {
  Application application = Application::symreg;
  // symreg: nguyen4 | keijzer11 | r1 | path to a numeric csv
  // djss:   <objective>:<utilization>, e.g. Fmean:0.85
  std::string problem = "nguyen4";
  std::string target;            // csv target column (name or index); default last
  double train_fraction = 0.75;  // csv split
  std::string preset = "mrgp-tl";
  PresetOverrides overrides;
  int runs = 1;
  std::uint64_t base_seed = 0;
  std::filesystem::path out_dir = "results";
  int workers = 1;
  djss::BackendConfig djss;  // objective/utilization come from `problem`
};

struct RunOutcome {
  int run_index = 0;
  std::uint64_t seed = 0;
  double final_train_fitness = 0.0;
  std::optional<double> validation_fitness;
  double test_performance = 0.0;
  Rep best_rep = Rep::tree;
};

// Executes spec.runs independent runs (seed = base_seed + index) and writes
// run_<i>.csv, run_<i>_best.txt, run_<i>_meta.json and summary.csv under
// out_dir. Returns the per-run outcomes in order.
std::vector<RunOutcome> run_experiment(const ExperimentSpec& spec);

// JSON config with the same field names as the CLI flags.
ExperimentSpec load_spec(const std::filesystem::path& config_path);

// Aggregates summary.csv files under dir into per-(problem, method) statistics
// over test performance; returns CSV text.
std::string summarize(const std::filesystem::path& dir);

// worker count from the MRGP_WORKERS environment variable (default 1)
int workers_from_env();

}  // namespace mrgp
