#include "mrgp/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "mrgp/serialize.hpp"

namespace mrgp {

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::calx: return "calx";
    case OpKind::tree_crossover: return "crossover";
    case OpKind::tree_mutation: return "mutation";
    case OpKind::linear_crossover: return "crossover";
    case OpKind::macro_mutation: return "macro_mutation";
    case OpKind::micro_mutation: return "micro_mutation";
    case OpKind::reproduction: return "reproduction";
  }
  return "?";
}

int EvolutionConfig::total_population() const {
  int t = 0;
  for (const auto& s : subpops) t += s.size;
  return t;
}

void EvolutionConfig::validate() const {
  if (subpops.empty()) throw std::invalid_argument("config: no sub-populations");
  for (const auto& s : subpops) {
    if (s.size < 1) throw std::invalid_argument("config: sub-population size must be >= 1");
    double sum = 0.0;
    for (const auto& [k, p] : s.rates.entries) {
      if (p < 0.0) throw std::invalid_argument("config: negative operator rate");
      const bool tree_op = k == OpKind::tree_crossover || k == OpKind::tree_mutation;
      const bool linear_op =
          k == OpKind::linear_crossover || k == OpKind::macro_mutation || k == OpKind::micro_mutation;
      if (s.rep == Rep::tree && linear_op)
        throw std::invalid_argument("config: linear operator on a tree sub-population");
      if (s.rep == Rep::linear && tree_op)
        throw std::invalid_argument("config: tree operator on a linear sub-population");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("config: operator rates sum to " + format_double(sum) +
                                  ", expected 1");
  }
  if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("config: theta must be in [0, 1]");
  if (tournament_size < 1) throw std::invalid_argument("config: tournament size must be >= 1");
  if (elitism_fraction < 0.0 || elitism_fraction > 1.0)
    throw std::invalid_argument("config: elitism fraction must be in [0, 1]");
  if (budget < total_population())
    throw std::invalid_argument("config: budget is below one generation's evaluations");
  if (tree.max_depth < 1) throw std::invalid_argument("config: max tree depth must be >= 1");
  if (linear.min_len < 1 || linear.min_len > linear.max_len)
    throw std::invalid_argument("config: bad program length bounds");
  if (linear.num_registers < 1) throw std::invalid_argument("config: need at least one register");
  if (calx_max_segment < 1) throw std::invalid_argument("config: segment cap must be >= 1");
}

std::string run_record_csv(const RunRecord& rec) {
  std::string out =
      "generation,evaluations-used,best-fitness,best-representation,mean-size-tree,mean-size-linear\n";
  for (const auto& r : rec.rows) {
    out += std::to_string(r.generation) + ',' + std::to_string(r.evals_used) + ',' +
           format_double(r.best_fitness) + ',' + (r.best_rep == Rep::tree ? "tree" : "linear") +
           ',' + format_double(r.mean_size_tree) + ',' + format_double(r.mean_size_linear) + '\n';
  }
  return out;
}

std::size_t tournament_select(const std::vector<double>& fitness, int size, Rng& rng) {
  assert(!fitness.empty() && size >= 1);
  std::size_t draws[64];
  const int s = std::min(size, 64);
  for (int i = 0; i < s; ++i) draws[i] = rng.index(fitness.size());
  double best = fitness[draws[0]];
  for (int i = 1; i < s; ++i) best = std::min(best, fitness[draws[i]]);
  std::size_t tied[64];
  int n_tied = 0;
  for (int i = 0; i < s; ++i)
    if (fitness[draws[i]] == best) tied[n_tied++] = draws[i];
  return n_tied == 1 ? tied[0] : tied[rng.index(static_cast<std::size_t>(n_tied))];
}

namespace {

OpKind sample_op(const OperatorRates& rates, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [k, p] : rates.entries) {
    acc += p;
    if (u < acc) return k;
  }
  return rates.entries.back().first;
}

void evaluate_all(std::vector<std::vector<Individual>>& pops, const FitnessBackend& backend,
                  int workers, std::vector<std::vector<double>>& fitness) {
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t j = 0; j < pops.size(); ++j) {
    fitness[j].resize(pops[j].size());
    for (std::size_t i = 0; i < pops[j].size(); ++i) slots.emplace_back(j, i);
  }
  auto eval_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const auto [j, i] = slots[k];
      fitness[j][i] = backend.evaluate(pops[j][i]);
    }
  };
  if (workers <= 1) {
    eval_range(0, slots.size());
  } else {
    // static contiguous chunks joined in index order: same numbers as the
    // sequential path, just computed concurrently
    std::vector<std::thread> threads;
    const std::size_t n = slots.size();
    const std::size_t w = static_cast<std::size_t>(workers);
    for (std::size_t t = 0; t < w; ++t) {
      const std::size_t lo = n * t / w;
      const std::size_t hi = n * (t + 1) / w;
      if (lo < hi) threads.emplace_back(eval_range, lo, hi);
    }
    for (auto& th : threads) th.join();
  }
  for (std::size_t j = 0; j < pops.size(); ++j)
    for (std::size_t i = 0; i < pops[j].size(); ++i) fitness_of(pops[j][i]) = fitness[j][i];
}

std::vector<std::size_t> elite_indices(const std::vector<double>& fitness, int count) {
  std::vector<std::size_t> idx(fitness.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return fitness[a] != fitness[b] ? fitness[a] < fitness[b] : a < b;
  });
  idx.resize(static_cast<std::size_t>(count));
  return idx;
}

}  // namespace

RunRecord evolve(const EvolutionConfig& config, FitnessBackend& backend, int workers) {
  config.validate();
  Rng rng(config.seed);
  const PrimitiveSet& prims = backend.primitives();
  const auto nsub = config.subpops.size();
  const long long per_gen = config.total_population();
  const CalxParams cparams{config.tree, config.linear, config.calx_max_segment};

  std::vector<std::vector<Individual>> pops(nsub);
  for (std::size_t j = 0; j < nsub; ++j) {
    pops[j].reserve(static_cast<std::size_t>(config.subpops[j].size));
    for (int i = 0; i < config.subpops[j].size; ++i) {
      if (config.subpops[j].rep == Rep::tree)
        pops[j].emplace_back(init_tree(rng, prims, config.tree));
      else
        pops[j].emplace_back(init_linear(rng, prims, config.linear));
    }
  }

  RunRecord rec;
  rec.best_fitness = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> fitness(nsub);
  long long evals = 0;
  int gen = 0;

  while (evals + per_gen <= config.budget) {
    backend.begin_generation(gen);
    evaluate_all(pops, backend, workers, fitness);
    evals += per_gen;

    // generation stats and best-so-far (first strictly better wins)
    double gen_best = std::numeric_limits<double>::infinity();
    std::size_t bj = 0, bi = 0;
    double tree_size_sum = 0.0, linear_size_sum = 0.0;
    long tree_n = 0, linear_n = 0;
    for (std::size_t j = 0; j < nsub; ++j) {
      for (std::size_t i = 0; i < pops[j].size(); ++i) {
        if (fitness[j][i] < gen_best) {
          gen_best = fitness[j][i];
          bj = j;
          bi = i;
        }
        if (config.subpops[j].rep == Rep::tree) {
          tree_size_sum += program_size(pops[j][i]);
          ++tree_n;
        } else {
          linear_size_sum += program_size(pops[j][i]);
          ++linear_n;
        }
      }
    }
    rec.generation_bests.push_back(pops[bj][bi]);
    rec.generation_best_fitness.push_back(gen_best);
    if (gen_best < rec.best_fitness) {
      rec.best_fitness = gen_best;
      rec.best = pops[bj][bi];
      rec.best_rep = config.subpops[bj].rep;
    }
    rec.rows.push_back(GenerationRow{gen, evals, rec.best_fitness, rec.best_rep,
                                     tree_n ? tree_size_sum / tree_n : 0.0,
                                     linear_n ? linear_size_sum / linear_n : 0.0});
    ++gen;
    if (evals + per_gen > config.budget) break;

    // breed every sub-population from the current generation's fitness
    std::vector<std::vector<Individual>> next(nsub);
    for (std::size_t j = 0; j < nsub; ++j) {
      const auto& spec = config.subpops[j];
      const auto n = static_cast<std::size_t>(spec.size);
      auto& out = next[j];
      out.reserve(n);

      const int n_elite =
          config.elitism_fraction > 0.0
              ? std::max(1, static_cast<int>(std::floor(config.elitism_fraction * spec.size)))
              : 0;
      for (std::size_t e : elite_indices(fitness[j], n_elite)) out.push_back(pops[j][e]);

      const std::string prefix = spec.rep == Rep::tree ? "tree/" : "linear/";
      while (out.size() < n) {
        if (rng.uniform() < config.theta) {
          ++rec.operator_counts[prefix + "calx"];
          const Individual& p1 = pops[j][tournament_select(fitness[j], config.tournament_size, rng)];
          const auto dj = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(nsub) - 1));
          const Individual& p2 =
              pops[dj][tournament_select(fitness[dj], config.tournament_size, rng)];
          out.push_back(calx(p1, p2, rng, prims, cparams));
          continue;
        }
        const OpKind op = sample_op(spec.rates, rng);
        ++rec.operator_counts[prefix + op_name(op)];
        switch (op) {
          case OpKind::tree_crossover: {
            const auto& p1 =
                std::get<TreeIndividual>(pops[j][tournament_select(fitness[j], config.tournament_size, rng)]);
            const auto& p2 =
                std::get<TreeIndividual>(pops[j][tournament_select(fitness[j], config.tournament_size, rng)]);
            auto [c1, c2] = subtree_crossover(p1, p2, rng, config.tree);
            out.push_back(std::move(c1));
            if (out.size() < n) out.push_back(std::move(c2));
            break;
          }
          case OpKind::tree_mutation: {
            const auto& p1 =
                std::get<TreeIndividual>(pops[j][tournament_select(fitness[j], config.tournament_size, rng)]);
            out.push_back(subtree_mutation(p1, rng, prims, config.tree));
            break;
          }
          case OpKind::linear_crossover: {
            const auto& p1 = std::get<LinearIndividual>(
                pops[j][tournament_select(fitness[j], config.tournament_size, rng)]);
            const auto& p2 = std::get<LinearIndividual>(
                pops[j][tournament_select(fitness[j], config.tournament_size, rng)]);
            auto [c1, c2] = linear_crossover(p1, p2, rng, config.linear);
            out.push_back(std::move(c1));
            if (out.size() < n) out.push_back(std::move(c2));
            break;
          }
          case OpKind::macro_mutation: {
            const auto& p1 = std::get<LinearIndividual>(
                pops[j][tournament_select(fitness[j], config.tournament_size, rng)]);
            out.push_back(effective_macro_mutation(p1, rng, prims, config.linear));
            break;
          }
          case OpKind::micro_mutation: {
            const auto& p1 = std::get<LinearIndividual>(
                pops[j][tournament_select(fitness[j], config.tournament_size, rng)]);
            out.push_back(effective_micro_mutation(p1, rng, prims, config.linear));
            break;
          }
          case OpKind::calx:
            assert(false && "calx is driven by theta, not the basic rate table");
            break;
          case OpKind::reproduction:
            out.push_back(pops[j][tournament_select(fitness[j], config.tournament_size, rng)]);
            break;
        }
      }
      // representation closure: every offspring matches its sub-population
      for (const auto& ind : out) {
        assert(rep_of(ind) == spec.rep);
        (void)ind;
      }
    }
    pops = std::move(next);
  }

  rec.evaluations = evals;
  return rec;
}

namespace {

OperatorRates folded_rates(Rep rep, double theta) {
  std::vector<std::pair<OpKind, double>> base;
  OpKind foldable;
  if (rep == Rep::tree) {
    base = {{OpKind::tree_crossover, 0.80}, {OpKind::tree_mutation, 0.15},
            {OpKind::reproduction, 0.05}};
    foldable = OpKind::tree_crossover;
  } else {
    base = {{OpKind::linear_crossover, 0.30},
            {OpKind::macro_mutation, 0.30},
            {OpKind::micro_mutation, 0.30},
            {OpKind::reproduction, 0.10}};
    foldable = OpKind::linear_crossover;
  }
  // the transfer rate displaces same-representation crossover first
  double total = 0.0;
  for (auto& [k, p] : base) {
    if (k == foldable) p = std::max(0.0, p - theta);
    total += p;
  }
  // a total within float noise of 1 means nothing was displaced; skip the
  // no-op division so the stored rates stay exactly the documented literals
  if (std::fabs(total - 1.0) > 1e-12)
    for (auto& [k, p] : base) p /= total;
  return OperatorRates{std::move(base)};
}

}  // namespace

EvolutionConfig make_preset(const std::string& name, Application app,
                            const PresetOverrides& overrides) {
  EvolutionConfig cfg;
  if (app == Application::symreg) {
    cfg.tree.max_depth = 10;
    cfg.linear = LinearParams{1, 100, 8, 5, 20, 0.5, 10};
  } else {
    cfg.tree.max_depth = 8;
    cfg.linear = LinearParams{1, 50, 8, 1, 10, 0.5, 10};
  }
  cfg.budget = overrides.budget.value_or(51200);
  cfg.elitism_fraction = overrides.elitism_fraction.value_or(0.10);
  cfg.calx_max_segment = overrides.calx_max_segment.value_or(10);

  double theta = 0.0;
  std::vector<std::pair<Rep, int>> shape;
  if (name == "tgp") {
    shape = {{Rep::tree, overrides.population.value_or(1024)}};
  } else if (name == "lgp") {
    shape = {{Rep::linear, overrides.population.value_or(256)}};
  } else if (name == "tlgp" || name == "mrgp-tl") {
    if (name == "mrgp-tl") theta = 0.3;
    const int total = overrides.population.value_or(256);
    const double ratio = overrides.lgp_ratio.value_or(0.5);
    if (ratio < 0.0 || ratio > 1.0)
      throw std::invalid_argument("lgp ratio must be in [0, 1]");
    const int linear_n = static_cast<int>(std::lround(total * ratio));
    const int tree_n = total - linear_n;
    if (tree_n > 0) shape.emplace_back(Rep::tree, tree_n);
    if (linear_n > 0) shape.emplace_back(Rep::linear, linear_n);
  } else {
    throw std::invalid_argument("unknown preset '" + name +
                                "' (expected tgp, lgp, tlgp or mrgp-tl)");
  }
  if (overrides.lgp_ratio && (name == "tgp" || name == "lgp"))
    throw std::invalid_argument("pop-ratio only applies to the two-population presets");
  theta = overrides.theta.value_or(theta);
  cfg.theta = theta;
  for (auto [rep, size] : shape)
    cfg.subpops.push_back(SubPopulationSpec{rep, size, folded_rates(rep, theta)});
  cfg.validate();
  return cfg;
}

}  // namespace mrgp
