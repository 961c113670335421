#include "mrgp/djss.hpp"

#include <cassert>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace mrgp::djss {

Objective objective_from_name(const std::string& name) {
  if (name == "Tmax") return Objective::Tmax;
  if (name == "Tmean") return Objective::Tmean;
  if (name == "WTmean") return Objective::WTmean;
  if (name == "Fmax") return Objective::Fmax;
  if (name == "Fmean") return Objective::Fmean;
  if (name == "WFmean") return Objective::WFmean;
  throw std::invalid_argument("unknown objective '" + name +
                              "' (expected Tmax, Tmean, WTmean, Fmax, Fmean or WFmean)");
}

const char* objective_name(Objective o) {
  switch (o) {
    case Objective::Tmax: return "Tmax";
    case Objective::Tmean: return "Tmean";
    case Objective::WTmean: return "WTmean";
    case Objective::Fmax: return "Fmax";
    case Objective::Fmean: return "Fmean";
    case Objective::WFmean: return "WFmean";
  }
  return "?";
}

double mean_interarrival(double mean_ops, double mean_proc, double utilization, int num_machines) {
  if (utilization <= 0.0 || num_machines < 1 || mean_ops <= 0.0 || mean_proc <= 0.0)
    throw std::invalid_argument("mean_interarrival: bad shop parameters");
  return mean_ops * mean_proc / (utilization * num_machines);
}

double objective_value(Objective o, std::span<const JobSummary> jobs) {
  if (jobs.empty()) throw std::invalid_argument("objective over an empty job set");
  const auto n = static_cast<double>(jobs.size());
  double acc = 0.0;
  switch (o) {
    case Objective::Fmax:
      for (const auto& j : jobs) acc = std::max(acc, j.completion - j.arrival);
      return acc;
    case Objective::Fmean:
      for (const auto& j : jobs) acc += j.completion - j.arrival;
      return acc / n;
    case Objective::WFmean:
      for (const auto& j : jobs) acc += j.weight * (j.completion - j.arrival);
      return acc / n;
    case Objective::Tmax:
      for (const auto& j : jobs) acc = std::max(acc, std::max(0.0, j.completion - j.due));
      return acc;
    case Objective::Tmean:
      for (const auto& j : jobs) acc += std::max(0.0, j.completion - j.due);
      return acc / n;
    case Objective::WTmean:
      for (const auto& j : jobs) acc += j.weight * std::max(0.0, j.completion - j.due);
      return acc / n;
  }
  return 0.0;
}

namespace {

struct OpSpec {
  int machine = 0;
  double proc = 0;
  double op_due = 0;    // arrival + tightness * (work through this op)
  double rem_incl = 0;  // processing time remaining, this op included
};

struct Job {
  double arrival = 0, due = 0, weight = 1, total_work = 0;
  std::vector<OpSpec> ops;
  int next = 0;
};

struct QueueEnt {
  int job = 0;
  double ready = 0;
  long long seq = 0;
};

struct MachineState {
  bool busy = false;
  double idle_since = 0.0;
  std::vector<QueueEnt> queue;
  double work_in_queue = 0.0;
};

struct Ev {
  double time = 0;
  long long seq = 0;
  int kind = 0;  // 0 arrival, 1 completion
  int machine = 0;
  int job = 0;
};

struct EvAfter {
  bool operator()(const Ev& a, const Ev& b) const {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

void check_params(const ShopParams& p) {
  if (p.num_machines < 2) throw std::invalid_argument("shop needs at least two machines");
  if (p.utilization <= 0.0) throw std::invalid_argument("utilization must be positive");
  if (p.warmup_jobs < 0 || p.recorded_jobs < 1)
    throw std::invalid_argument("bad warmup/recorded job counts");
  if (p.min_ops < 1 || p.min_ops > p.max_ops) throw std::invalid_argument("bad operation counts");
  if (p.min_proc < 1 || p.min_proc > p.max_proc)
    throw std::invalid_argument("bad processing time bounds");
  double wsum = 0.0;
  for (const auto& [v, pr] : p.weight_dist) {
    (void)v;
    wsum += pr;
  }
  if (p.weight_dist.empty() || std::fabs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("weight probabilities must sum to 1");
  if (p.due_date_tightness <= 0.0) throw std::invalid_argument("due-date tightness must be positive");
}

}  // namespace

SimResult simulate(const RuleFn& rule, const ShopParams& params, Objective obj,
                   std::uint64_t instance_seed, bool collect_details) {
  check_params(params);
  Rng rng(instance_seed);
  const double lambda =
      mean_interarrival(0.5 * (params.min_ops + params.max_ops),
                        0.5 * (params.min_proc + params.max_proc), params.utilization,
                        params.num_machines);

  std::vector<Job> jobs;
  jobs.reserve(static_cast<std::size_t>(params.warmup_jobs + params.recorded_jobs) + 1024);
  std::vector<MachineState> machines(static_cast<std::size_t>(params.num_machines));
  std::priority_queue<Ev, std::vector<Ev>, EvAfter> events;
  long long ev_seq = 0, q_seq = 0;

  std::vector<JobSummary> recorded;
  recorded.reserve(static_cast<std::size_t>(params.recorded_jobs));
  std::vector<LogEvent> log;
  int recorded_done = 0;
  const int first_rec = params.warmup_jobs;
  const int last_rec = params.warmup_jobs + params.recorded_jobs;
  double features[kNumFeatures];

  auto machine_wait = [](const MachineState& m, double now) {
    return m.busy ? 0.0 : now - m.idle_since;
  };

  auto dispatch = [&](int m_idx, double now) {
    MachineState& m = machines[static_cast<std::size_t>(m_idx)];
    assert(!m.busy);
    if (m.queue.empty()) return;
    std::size_t pick = 0;
    if (m.queue.size() > 1 || params.always_evaluate) {
      double best_p = 0.0, best_ready = 0.0;
      long long best_seq = 0;
      bool first = true;
      for (std::size_t i = 0; i < m.queue.size(); ++i) {
        const QueueEnt& qe = m.queue[i];
        const Job& j = jobs[static_cast<std::size_t>(qe.job)];
        const OpSpec& op = j.ops[static_cast<std::size_t>(j.next)];
        const bool has_next = j.next + 1 < static_cast<int>(j.ops.size());
        const OpSpec* nop = has_next ? &j.ops[static_cast<std::size_t>(j.next + 1)] : nullptr;
        const MachineState* nm =
            has_next ? &machines[static_cast<std::size_t>(nop->machine)] : nullptr;
        features[kPT] = op.proc;
        features[kNPT] = has_next ? nop->proc : 0.0;
        features[kWINQ] = has_next ? nm->work_in_queue : 0.0;
        features[kWKR] = op.rem_incl;
        features[krFDD] = op.op_due - now;
        features[kOWT] = now - qe.ready;
        features[kNOR] = static_cast<double>(j.ops.size()) - j.next;
        features[kNINQ] = has_next ? static_cast<double>(nm->queue.size()) : 0.0;
        features[kW] = j.weight;
        features[krDD] = j.due - now;
        features[kNWT] = has_next ? machine_wait(*nm, now) : 0.0;
        features[kTIS] = now - j.arrival;
        features[kSL] = (j.due - now) - op.rem_incl;
        features[kNIQ] = static_cast<double>(m.queue.size());
        features[kWIQ] = m.work_in_queue;
        features[kMWT] = machine_wait(m, now);
        double p = rule(std::span<const double>(features, kNumFeatures));
        if (!params.lowest_priority_first) p = -p;
        // lowest value wins; ties go to the earliest-queued candidate
        const bool better = first || p < best_p ||
                            (p == best_p && (qe.ready < best_ready ||
                                             (qe.ready == best_ready && qe.seq < best_seq)));
        if (better) {
          best_p = p;
          best_ready = qe.ready;
          best_seq = qe.seq;
          pick = i;
          first = false;
        }
      }
    }
    const QueueEnt qe = m.queue[pick];
    m.queue.erase(m.queue.begin() + static_cast<std::ptrdiff_t>(pick));
    Job& j = jobs[static_cast<std::size_t>(qe.job)];
    const OpSpec& op = j.ops[static_cast<std::size_t>(j.next)];
    m.work_in_queue -= op.proc;
    m.busy = true;
    events.push(Ev{now + op.proc, ev_seq++, 1, m_idx, qe.job});
    if (collect_details) log.push_back(LogEvent{now, 'S', qe.job, j.next, m_idx});
  };

  auto enqueue_current_op = [&](int job_idx, double now) {
    Job& j = jobs[static_cast<std::size_t>(job_idx)];
    const OpSpec& op = j.ops[static_cast<std::size_t>(j.next)];
    MachineState& m = machines[static_cast<std::size_t>(op.machine)];
    m.queue.push_back(QueueEnt{job_idx, now, q_seq++});
    m.work_in_queue += op.proc;
    if (!m.busy) dispatch(op.machine, now);
  };

  events.push(Ev{rng.exponential(lambda), ev_seq++, 0, 0, 0});

  while (recorded_done < params.recorded_jobs) {
    assert(!events.empty());
    const Ev ev = events.top();
    events.pop();
    const double now = ev.time;

    if (ev.kind == 0) {
      const int idx = static_cast<int>(jobs.size());
      Job j;
      j.arrival = now;
      const int n_ops = static_cast<int>(rng.uniform_int(params.min_ops, params.max_ops));
      j.ops.resize(static_cast<std::size_t>(n_ops));
      int prev = -1;
      double total = 0.0;
      for (int k = 0; k < n_ops; ++k) {
        int mch;
        if (prev < 0) {
          mch = static_cast<int>(rng.uniform_int(0, params.num_machines - 1));
        } else {
          // uniform over the other machines: no immediate repetition
          const int r = static_cast<int>(rng.uniform_int(0, params.num_machines - 2));
          mch = r >= prev ? r + 1 : r;
        }
        const double proc = static_cast<double>(rng.uniform_int(params.min_proc, params.max_proc));
        j.ops[static_cast<std::size_t>(k)].machine = mch;
        j.ops[static_cast<std::size_t>(k)].proc = proc;
        prev = mch;
        total += proc;
      }
      const double u = rng.uniform();
      double acc = 0.0;
      j.weight = params.weight_dist.back().first;
      for (const auto& [val, pr] : params.weight_dist) {
        acc += pr;
        if (u < acc) {
          j.weight = val;
          break;
        }
      }
      j.total_work = total;
      j.due = now + params.due_date_tightness * total;
      double cum = 0.0;
      for (int k = 0; k < n_ops; ++k) {
        auto& op = j.ops[static_cast<std::size_t>(k)];
        op.rem_incl = total - cum;
        cum += op.proc;
        op.op_due = now + params.due_date_tightness * cum;
      }
      jobs.push_back(std::move(j));
      if (collect_details)
        log.push_back(LogEvent{now, 'A', idx, 0, jobs.back().ops[0].machine});
      events.push(Ev{now + rng.exponential(lambda), ev_seq++, 0, 0, 0});
      enqueue_current_op(idx, now);
    } else {
      Job& j = jobs[static_cast<std::size_t>(ev.job)];
      MachineState& m = machines[static_cast<std::size_t>(ev.machine)];
      if (collect_details) log.push_back(LogEvent{now, 'C', ev.job, j.next, ev.machine});
      ++j.next;
      m.busy = false;
      m.idle_since = now;
      if (j.next < static_cast<int>(j.ops.size())) {
        enqueue_current_op(ev.job, now);  // routing never repeats a machine
      } else if (ev.job >= first_rec && ev.job < last_rec) {
        recorded.push_back(JobSummary{j.arrival, now, j.due, j.weight, j.total_work});
        ++recorded_done;
      }
      dispatch(ev.machine, now);
    }
  }

  SimResult res;
  res.objective = objective_value(obj, recorded);
  if (collect_details) {
    res.recorded = std::move(recorded);
    res.log = std::move(log);
  }
  return res;
}

RuleFn compile_rule(const Individual& ind) {
  if (const auto* t = std::get_if<TreeIndividual>(&ind)) {
    auto keep = std::make_shared<TreeIndividual>(*t);
    return [keep](std::span<const double> f) { return eval_tree(*keep, f); };
  }
  auto keep = std::make_shared<LinearIndividual>(strip_introns(std::get<LinearIndividual>(ind)));
  return [keep](std::span<const double> f) { return eval_linear(*keep, f); };
}

Backend::Backend(BackendConfig cfg) : cfg_(std::move(cfg)), prims_(djss_primitive_set()) {
  if (cfg_.validation_instances < 1 || cfg_.test_instances < 1)
    throw std::invalid_argument("need at least one validation and one test instance");
  check_params(cfg_.shop);
  current_train_seed_ = cfg_.instance_seed_base;
}

void Backend::begin_generation(int generation) { current_train_seed_ = train_seed(generation); }

double Backend::evaluate(const Individual& ind) const {
  return simulate(compile_rule(ind), cfg_.shop, cfg_.objective, current_train_seed_).objective;
}

double Backend::validate(const Individual& ind) const {
  const RuleFn rule = compile_rule(ind);
  double acc = 0.0;
  for (int i = 0; i < cfg_.validation_instances; ++i)
    acc += simulate(rule, cfg_.shop, cfg_.objective, validation_seed(i)).objective;
  return acc / cfg_.validation_instances;
}

double Backend::test(const Individual& ind) const {
  const RuleFn rule = compile_rule(ind);
  double acc = 0.0;
  for (int i = 0; i < cfg_.test_instances; ++i)
    acc += simulate(rule, cfg_.shop, cfg_.objective, test_seed(i)).objective;
  return acc / cfg_.test_instances;
}

}  // namespace mrgp::djss
