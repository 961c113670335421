// Batch experiment driver and program inspection tools for the
// multi-representation GP engine.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mrgp/runner.hpp"
#include "mrgp/serialize.hpp"

namespace {

// permissive vocabulary for inspecting programs of either application:
// the union of both function sets, the shop terminals, and x1..x64
mrgp::PrimitiveSet inspection_primitives() {
  const mrgp::PrimitiveSet sr = mrgp::symreg_primitive_set(64);
  const mrgp::PrimitiveSet shop = mrgp::djss_primitive_set();
  std::vector<mrgp::Function> fns = sr.functions();
  for (const auto& f : shop.functions())
    if (std::none_of(fns.begin(), fns.end(), [&](const auto& g) { return g.name == f.name; }))
      fns.push_back(f);
  std::vector<mrgp::Terminal> terms = shop.terminals();
  const int base = static_cast<int>(terms.size());
  for (const auto& t : sr.terminals())
    terms.push_back(mrgp::Terminal::make_feature(t.name, base + t.feature));
  return mrgp::PrimitiveSet(std::move(fns), std::move(terms));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_command(const std::string& config_path, mrgp::ExperimentSpec& flags,
                const std::vector<std::string>& set_flags) {
  mrgp::ExperimentSpec spec =
      config_path.empty() ? mrgp::ExperimentSpec{} : mrgp::load_spec(config_path);

  auto given = [&](const std::string& name) {
    return std::find(set_flags.begin(), set_flags.end(), name) != set_flags.end();
  };
  if (given("--app")) spec.application = flags.application;
  if (given("--problem")) spec.problem = flags.problem;
  if (given("--target")) spec.target = flags.target;
  if (given("--split")) spec.train_fraction = flags.train_fraction;
  if (given("--preset")) spec.preset = flags.preset;
  if (given("--runs")) spec.runs = flags.runs;
  if (given("--seed")) spec.base_seed = flags.base_seed;
  if (given("--out")) spec.out_dir = flags.out_dir;
  if (given("--theta")) spec.overrides.theta = flags.overrides.theta;
  if (given("--pop-ratio")) spec.overrides.lgp_ratio = flags.overrides.lgp_ratio;
  if (given("--elitism")) spec.overrides.elitism_fraction = flags.overrides.elitism_fraction;
  if (given("--budget")) spec.overrides.budget = flags.overrides.budget;
  if (given("--population")) spec.overrides.population = flags.overrides.population;
  spec.workers = mrgp::workers_from_env();

  const auto outcomes = mrgp::run_experiment(spec);
  for (const auto& o : outcomes) {
    std::cout << "run " << o.run_index << " seed " << o.seed
              << " train " << mrgp::format_double(o.final_train_fitness);
    if (o.validation_fitness)
      std::cout << " validation " << mrgp::format_double(*o.validation_fitness);
    std::cout << " test " << mrgp::format_double(o.test_performance) << " ("
              << (o.best_rep == mrgp::Rep::tree ? "tree" : "linear") << ")\n";
  }
  std::cout << "wrote " << (spec.out_dir / "summary.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-representation genetic programming engine"};
  app.require_subcommand(1);

  mrgp::ExperimentSpec flags;
  std::string config_path;
  double theta = 0.0, pop_ratio = 0.0, elitism = 0.0;
  long long budget = 0;
  int population = 0;
  std::string app_name = "symreg";

  CLI::App* run = app.add_subcommand("run", "run a batch experiment");
  run->add_option("--config", config_path, "JSON experiment config");
  run->add_option("--app", app_name, "symreg or djss")
      ->check(CLI::IsMember({"symreg", "djss"}));
  run->add_option("--problem", flags.problem,
                  "nguyen4|keijzer11|r1, a csv path, or <objective>:<utilization>");
  run->add_option("--target", flags.target, "csv target column (name or index)");
  run->add_option("--split", flags.train_fraction, "csv train fraction");
  run->add_option("--preset", flags.preset, "tgp, lgp, tlgp or mrgp-tl");
  run->add_option("--runs", flags.runs, "number of independent runs");
  run->add_option("--seed", flags.base_seed, "base seed; run i uses seed+i");
  run->add_option("--out", flags.out_dir, "output directory");
  run->add_option("--theta", theta, "transfer rate override");
  run->add_option("--pop-ratio", pop_ratio, "linear share of the population");
  run->add_option("--elitism", elitism, "elite fraction override");
  run->add_option("--budget", budget, "evaluation budget override");
  run->add_option("--population", population, "total population override");

  std::string program_path;
  CLI::App* dump_prog = app.add_subcommand("dump-program", "pretty-print a serialized program");
  dump_prog->add_option("file", program_path, "program file")->required();

  std::string adj_path;
  CLI::App* dump_adj =
      app.add_subcommand("dump-adjacency", "print a program's adjacency-list form");
  dump_adj->add_option("file", adj_path, "program file")->required();

  std::string summary_dir;
  CLI::App* summ = app.add_subcommand("summarize", "aggregate summary.csv files");
  summ->add_option("dir", summary_dir, "results directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      std::vector<std::string> set_flags;
      for (const auto* opt : run->get_options())
        if (opt->count() > 0) set_flags.push_back(opt->get_name());
      flags.application = app_name == "djss" ? mrgp::Application::djss : mrgp::Application::symreg;
      flags.overrides.theta = theta;
      flags.overrides.lgp_ratio = pop_ratio;
      flags.overrides.elitism_fraction = elitism;
      flags.overrides.budget = budget;
      flags.overrides.population = population;
      return run_command(config_path, flags, set_flags);
    }
    if (dump_prog->parsed()) {
      const mrgp::PrimitiveSet prims = inspection_primitives();
      const mrgp::Individual ind = mrgp::parse_individual(read_file(program_path), prims);
      std::cout << mrgp::serialize_individual(ind, prims);
      if (std::holds_alternative<mrgp::TreeIndividual>(ind)) {
        std::cout << "\n";
      } else {
        const auto& lin = std::get<mrgp::LinearIndividual>(ind);
        std::cout << "registers: " << lin.num_registers
                  << ", effective: " << mrgp::effective_length(lin) << "/" << lin.length() << "\n";
      }
      return 0;
    }
    if (dump_adj->parsed()) {
      const mrgp::PrimitiveSet prims = inspection_primitives();
      const mrgp::Individual ind = mrgp::parse_individual(read_file(adj_path), prims);
      mrgp::AdjacencyList list;
      if (const auto* t = std::get_if<mrgp::TreeIndividual>(&ind)) {
        list = mrgp::tree_to_adjacency(*t->root);
      } else {
        const auto& lin = std::get<mrgp::LinearIndividual>(ind);
        list = mrgp::segment_to_adjacency(lin, 0, lin.length(), prims);
      }
      std::cout << mrgp::format_adjacency(list) << "\n";
      return 0;
    }
    if (summ->parsed()) {
      std::cout << mrgp::summarize(summary_dir);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
