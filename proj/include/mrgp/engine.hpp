#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrgp/fitness.hpp"
#include "mrgp/individual.hpp"
#include "mrgp/rng.hpp"
#include "mrgp/xrep.hpp"

namespace mrgp {

enum class OpKind {
  calx,
  tree_crossover,
  tree_mutation,
  linear_crossover,
  macro_mutation,
  micro_mutation,
  reproduction,
};

const char* op_name(OpKind k);

// conditional probabilities of the non-transfer operators; must sum to 1
struct OperatorRates {
  std::vector<std::pair<OpKind, double>> entries;
};

struct SubPopulationSpec {
  Rep rep = Rep::tree;
  int size = 0;
  OperatorRates rates;
};

struct EvolutionConfig {
  std::vector<SubPopulationSpec> subpops;
  double theta = 0.0;  // per-slot probability of a cross-representation transfer
  int tournament_size = 7;
  double elitism_fraction = 0.10;
  long long budget = 51200;  // total fitness evaluations
  std::uint64_t seed = 0;

  TreeParams tree;
  LinearParams linear;
  int calx_max_segment = 10;

  int total_population() const;
  void validate() const;  // throws std::invalid_argument
};

struct GenerationRow {
  int generation = 0;
  long long evals_used = 0;
  double best_fitness = 0.0;
  Rep best_rep = Rep::tree;
  double mean_size_tree = 0.0;
  double mean_size_linear = 0.0;
};

struct RunRecord {
  std::vector<GenerationRow> rows;
  Individual best;  // best-of-run by training fitness
  double best_fitness = 0.0;
  Rep best_rep = Rep::tree;
  std::vector<Individual> generation_bests;
  std::vector<double> generation_best_fitness;
  std::map<std::string, long long> operator_counts;
  long long evaluations = 0;
};

// header: generation,evaluations-used,best-fitness,best-representation,
//         mean-size-tree,mean-size-linear
std::string run_record_csv(const RunRecord& rec);

// tournament of `size` draws with replacement over `fitness`; lowest wins,
// ties among the drawn candidates broken uniformly
std::size_t tournament_select(const std::vector<double>& fitness, int size, Rng& rng);

RunRecord evolve(const EvolutionConfig& config, FitnessBackend& backend, int workers = 1);

enum class Application { symreg, djss };

struct PresetOverrides {
  std::optional<double> theta;
  std::optional<double> lgp_ratio;  // share of the population that is linear
  std::optional<double> elitism_fraction;
  std::optional<int> calx_max_segment;
  std::optional<long long> budget;
  std::optional<int> population;  // scales subpopulation sizes
};

// tgp | lgp | tlgp | mrgp-tl with their standard parameter defaults; overrides
// re-derive the operator schedule, so mrgp-tl at theta 0 equals tlgp exactly
EvolutionConfig make_preset(const std::string& name, Application app,
                            const PresetOverrides& overrides = {});

}  // namespace mrgp
