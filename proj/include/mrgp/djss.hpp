#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mrgp/fitness.hpp"
#include "mrgp/rng.hpp"

namespace mrgp::djss {

enum class Objective { Tmax, Tmean, WTmean, Fmax, Fmean, WFmean };

Objective objective_from_name(const std::string& name);
const char* objective_name(Objective o);

// indices into the 16-entry feature vector handed to a dispatch rule,
// matching the terminal order of djss_primitive_set()
enum Feature : int {
  kPT = 0,   // processing time of the candidate operation
  kNPT,      // processing time of the job's next operation
  kWINQ,     // queued work at the next operation's machine
  kWKR,      // work remaining for the job, candidate included
  krFDD,     // operation flow due date minus now
  kOWT,      // how long the candidate has waited in this queue
  kNOR,      // operations remaining, candidate included
  kNINQ,     // queue length at the next operation's machine
  kW,        // job weight
  krDD,      // job due date minus now
  kNWT,      // idle time so far of the next operation's machine
  kTIS,      // time since the job arrived
  kSL,       // slack: rDD - WKR
  kNIQ,      // queue length here
  kWIQ,      // queued work here
  kMWT,      // idle time so far of this machine
};
inline constexpr int kNumFeatures = 16;

struct ShopParams {
  int num_machines = 10;
  double utilization = 0.85;
  int warmup_jobs = 1000;    // arrivals skipped before recording starts
  int recorded_jobs = 5000;  // arrivals whose completion is scored
  int min_ops = 2, max_ops = 10;
  int min_proc = 1, max_proc = 99;  // integer processing times
  double due_date_tightness = 1.5;
  // weight values with probabilities (must sum to 1)
  std::vector<std::pair<double, double>> weight_dist = {{1.0, 0.2}, {2.0, 0.6}, {4.0, 0.2}};
  bool lowest_priority_first = true;
  bool always_evaluate = false;  // also call the rule for single-candidate queues
};

// expected interarrival time keeping the machines at the target utilization
double mean_interarrival(double mean_ops, double mean_proc, double utilization, int num_machines);

struct JobSummary {
  double arrival = 0, completion = 0, due = 0, weight = 1, total_work = 0;
};

struct LogEvent {
  double time = 0;
  char kind = 0;  // 'A' arrival, 'S' operation start, 'C' operation completion
  int job = 0, op = 0, machine = 0;
};

struct SimResult {
  double objective = 0.0;
  std::vector<JobSummary> recorded;  // filled when collect_details
  std::vector<LogEvent> log;         // filled when collect_details
};

using RuleFn = std::function<double(std::span<const double>)>;

// Non-delay discrete-event simulation of the dynamic shop described by
// `params`, fully determined by `instance_seed`. The rule sees the 16-entry
// feature vector; the candidate with the lowest value is dispatched first
// (ties: earliest queue entry).
SimResult simulate(const RuleFn& rule, const ShopParams& params, Objective obj,
                   std::uint64_t instance_seed, bool collect_details = false);

// Evolved individual -> dispatch rule (linear genomes run intron-free).
RuleFn compile_rule(const Individual& ind);

double objective_value(Objective o, std::span<const JobSummary> jobs);

struct BackendConfig {
  ShopParams shop;
  Objective objective = Objective::Fmean;
  std::uint64_t instance_seed_base = 0;
  int validation_instances = 10;
  int test_instances = 50;
};

// Training rotates through one fresh instance per generation; validation and
// test use fixed disjoint instance sets shared by every run and method.
class Backend : public FitnessBackend {
 public:
  explicit Backend(BackendConfig cfg);

  void begin_generation(int generation) override;
  double evaluate(const Individual& ind) const override;
  bool has_validation() const override { return true; }
  double validate(const Individual& ind) const override;
  double test(const Individual& ind) const override;
  const PrimitiveSet& primitives() const override { return prims_; }

  std::uint64_t train_seed(int generation) const { return cfg_.instance_seed_base + static_cast<std::uint64_t>(generation); }
  std::uint64_t validation_seed(int i) const { return cfg_.instance_seed_base + 10000u + static_cast<std::uint64_t>(i); }
  std::uint64_t test_seed(int i) const { return cfg_.instance_seed_base + 20000u + static_cast<std::uint64_t>(i); }
  const BackendConfig& config() const { return cfg_; }

 private:
  BackendConfig cfg_;
  PrimitiveSet prims_;
  std::uint64_t current_train_seed_ = 0;
};

}  // namespace mrgp::djss
