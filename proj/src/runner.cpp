#include "mrgp/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>

#include "json.hpp"
#include "mrgp/csv.hpp"
#include "mrgp/serialize.hpp"

namespace mrgp {

namespace {

constexpr std::uint64_t kProblemSeedSalt = 0x9e3779b97f4a7c15ull;

std::pair<djss::Objective, double> parse_djss_problem(const std::string& problem) {
  const auto colon = problem.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("djss problem must be <objective>:<utilization>, e.g. Fmean:0.85");
  const djss::Objective obj = djss::objective_from_name(problem.substr(0, colon));
  const double rho = std::stod(problem.substr(colon + 1));
  if (rho <= 0.0 || rho > 1.0)
    throw std::invalid_argument("utilization must be in (0, 1], got " + problem.substr(colon + 1));
  return {obj, rho};
}

std::unique_ptr<FitnessBackend> make_backend(const ExperimentSpec& spec, std::uint64_t run_seed) {
  if (spec.application == Application::symreg) {
    Rng problem_rng(run_seed ^ kProblemSeedSalt);
    const bool is_file = spec.problem.size() > 4 &&
                         spec.problem.substr(spec.problem.size() - 4) == ".csv";
    symreg::Problem problem =
        is_file ? symreg::load_csv(spec.problem, problem_rng, spec.target, spec.train_fraction)
                : symreg::generate_synthetic(spec.problem, problem_rng);
    return std::make_unique<symreg::Backend>(std::move(problem));
  }
  djss::BackendConfig cfg = spec.djss;
  const auto [obj, rho] = parse_djss_problem(spec.problem);
  cfg.objective = obj;
  cfg.shop.utilization = rho;
  return std::make_unique<djss::Backend>(cfg);
}

std::string rep_name(Rep r) { return r == Rep::tree ? "tree" : "linear"; }

}  // namespace

int workers_from_env() {
  const char* env = std::getenv("MRGP_WORKERS");
  if (!env || !*env) return 1;
  const int w = std::atoi(env);
  if (w < 1) throw std::invalid_argument("MRGP_WORKERS must be a positive integer");
  return w;
}

std::vector<RunOutcome> run_experiment(const ExperimentSpec& spec) {
  if (spec.runs < 1) throw std::invalid_argument("runs must be >= 1");
  std::filesystem::create_directories(spec.out_dir);

  std::vector<RunOutcome> outcomes;
  csvio::Table summary;
  summary.header = {"run_index",          "seed",
                    "problem",            "method",
                    "final_train_fitness", "validation_fitness",
                    "test_performance",   "best_representation"};

  for (int r = 0; r < spec.runs; ++r) {
    const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(r);
    auto backend = make_backend(spec, seed);

    EvolutionConfig config = make_preset(spec.preset, spec.application, spec.overrides);
    config.seed = seed;
    const RunRecord rec = evolve(config, *backend, spec.workers);

    RunOutcome out;
    out.run_index = r;
    out.seed = seed;
    out.final_train_fitness = rec.best_fitness;

    // model selection: backends with a validation stage pick the
    // generation-best with the best validation score; others use the
    // training-best directly
    const Individual* chosen = &rec.best;
    Rep chosen_rep = rec.best_rep;
    if (backend->has_validation()) {
      double best_val = std::numeric_limits<double>::infinity();
      std::map<std::string, double> cache;  // identical programs share one score
      for (std::size_t g = 0; g < rec.generation_bests.size(); ++g) {
        const Individual& cand = rec.generation_bests[g];
        const std::string key = serialize_individual(cand, backend->primitives());
        auto it = cache.find(key);
        const double v = it != cache.end() ? it->second : backend->validate(cand);
        cache.emplace(key, v);
        if (v < best_val) {
          best_val = v;
          chosen = &cand;
          chosen_rep = rep_of(cand);
        }
      }
      out.validation_fitness = best_val;
    }
    out.test_performance = backend->test(*chosen);
    out.best_rep = chosen_rep;
    outcomes.push_back(out);

    const std::string stem = "run_" + std::to_string(r);
    csvio::write_file_atomic(spec.out_dir / (stem + ".csv"), run_record_csv(rec));
    csvio::write_file_atomic(spec.out_dir / (stem + "_best.txt"),
                             serialize_individual(*chosen, backend->primitives()));

    nlohmann::json meta;
    meta["run_index"] = r;
    meta["seed"] = seed;
    meta["problem"] = spec.problem;
    meta["preset"] = spec.preset;
    meta["theta"] = config.theta;
    meta["evaluations"] = rec.evaluations;
    meta["final_train_fitness"] = rec.best_fitness;
    if (out.validation_fitness) meta["validation_fitness"] = *out.validation_fitness;
    meta["test_performance"] = out.test_performance;
    meta["best_representation"] = rep_name(out.best_rep);
    meta["operator_counts"] = rec.operator_counts;
    csvio::write_file_atomic(spec.out_dir / (stem + "_meta.json"), meta.dump(2) + "\n");

    summary.rows.push_back({std::to_string(r), std::to_string(seed), spec.problem, spec.preset,
                            format_double(rec.best_fitness),
                            out.validation_fitness ? format_double(*out.validation_fitness) : "",
                            format_double(out.test_performance), rep_name(out.best_rep)});
  }

  csvio::write_file_atomic(spec.out_dir / "summary.csv", csvio::to_text(summary));
  return outcomes;
}

ExperimentSpec load_spec(const std::filesystem::path& config_path) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config " + config_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(config_path.string() + ": " + e.what());
  }

  ExperimentSpec spec;
  if (j.contains("application")) {
    const std::string app = j["application"];
    if (app == "symreg")
      spec.application = Application::symreg;
    else if (app == "djss")
      spec.application = Application::djss;
    else
      throw std::runtime_error("application must be symreg or djss, got '" + app + "'");
  }
  if (j.contains("problem")) spec.problem = j["problem"];
  if (j.contains("target")) spec.target = j["target"];
  if (j.contains("train_fraction")) spec.train_fraction = j["train_fraction"];
  if (j.contains("preset")) spec.preset = j["preset"];
  if (j.contains("runs")) spec.runs = j["runs"];
  if (j.contains("seed")) spec.base_seed = j["seed"];
  if (j.contains("out")) spec.out_dir = std::string(j["out"]);
  if (j.contains("theta")) spec.overrides.theta = j["theta"];
  if (j.contains("pop_ratio")) spec.overrides.lgp_ratio = j["pop_ratio"];
  if (j.contains("elitism")) spec.overrides.elitism_fraction = j["elitism"];
  if (j.contains("calx_max_segment")) spec.overrides.calx_max_segment = j["calx_max_segment"];
  if (j.contains("budget")) spec.overrides.budget = j["budget"];
  if (j.contains("population")) spec.overrides.population = j["population"];
  if (j.contains("djss")) {
    const auto& d = j["djss"];
    if (d.contains("due_date_tightness")) spec.djss.shop.due_date_tightness = d["due_date_tightness"];
    if (d.contains("warmup_jobs")) spec.djss.shop.warmup_jobs = d["warmup_jobs"];
    if (d.contains("recorded_jobs")) spec.djss.shop.recorded_jobs = d["recorded_jobs"];
    if (d.contains("num_machines")) spec.djss.shop.num_machines = d["num_machines"];
    if (d.contains("instance_seed_base")) spec.djss.instance_seed_base = d["instance_seed_base"];
    if (d.contains("validation_instances")) spec.djss.validation_instances = d["validation_instances"];
    if (d.contains("test_instances")) spec.djss.test_instances = d["test_instances"];
  }
  return spec;
}

std::string summarize(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir))
    throw std::runtime_error("no such directory: " + dir.string());

  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_regular_file(dir)) {
    files.push_back(dir);
  } else {
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().filename() == "summary.csv")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  }
  if (files.empty())
    throw std::runtime_error("no summary.csv found under " + dir.string());

  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& f : files) {
    const csvio::Table t = csvio::read_file(f);
    int prob_c = -1, meth_c = -1, test_c = -1;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (t.header[c] == "problem") prob_c = static_cast<int>(c);
      if (t.header[c] == "method") meth_c = static_cast<int>(c);
      if (t.header[c] == "test_performance") test_c = static_cast<int>(c);
    }
    if (prob_c < 0 || meth_c < 0 || test_c < 0)
      throw std::runtime_error(f.string() + ": not a summary file (missing columns)");
    for (const auto& row : t.rows)
      groups[{row[static_cast<std::size_t>(prob_c)], row[static_cast<std::size_t>(meth_c)]}]
          .push_back(std::stod(row[static_cast<std::size_t>(test_c)]));
  }

  csvio::Table out;
  out.header = {"problem", "method", "count", "mean", "std", "median", "min", "max"};
  for (auto& [key, vals] : groups) {
    std::sort(vals.begin(), vals.end());
    const auto n = vals.size();
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(n);
    double sd = 0.0;
    if (n > 1) {
      for (double v : vals) sd += (v - mean) * (v - mean);
      sd = std::sqrt(sd / static_cast<double>(n - 1));
    }
    const double median =
        n % 2 == 1 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
    out.rows.push_back({key.first, key.second, std::to_string(n), format_double(mean),
                        format_double(sd), format_double(median), format_double(vals.front()),
                        format_double(vals.back())});
  }
  return csvio::to_text(out);
}

}  // namespace mrgp
