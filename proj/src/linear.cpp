#include "mrgp/linear.hpp"

#include <cassert>
#include <stdexcept>

namespace mrgp {

namespace {

double operand_value(const Operand& op, const double* regs, std::span<const double> inputs) {
  switch (op.kind) {
    case Operand::Kind::reg:
      return regs[static_cast<std::size_t>(op.index)];
    case Operand::Kind::feature: {
      const auto idx = static_cast<std::size_t>(op.index);
      if (idx >= inputs.size())
        throw std::out_of_range("instruction references feature index " + std::to_string(op.index) +
                                " but only " + std::to_string(inputs.size()) + " inputs given");
      return inputs[idx];
    }
    case Operand::Kind::constant:
      return op.value;
  }
  return 0.0;
}

double eval_linear_on(const LinearIndividual& ind, std::span<const double> inputs, double* regs) {
  for (std::size_t i = 0; i < static_cast<std::size_t>(ind.num_registers); ++i)
    regs[i] = inputs[i % inputs.size()];
  for (const auto& ins : ind.instructions) {
    const double a = operand_value(ins.src1, regs, inputs);
    const double b = ins.fun->arity == 2 ? operand_value(ins.src2, regs, inputs) : 0.0;
    regs[static_cast<std::size_t>(ins.dst)] = apply(*ins.fun, a, b);
  }
  return regs[0];
}

}  // namespace

double eval_linear(const LinearIndividual& ind, std::span<const double> inputs) {
  assert(!inputs.empty());
  if (ind.num_registers <= 32) {
    double regs[32];
    return eval_linear_on(ind, inputs, regs);
  }
  std::vector<double> regs(static_cast<std::size_t>(ind.num_registers));
  return eval_linear_on(ind, inputs, regs.data());
}

std::vector<char> live_registers_at(const LinearIndividual& ind, int pos) {
  assert(pos >= 0 && pos <= ind.length());
  std::vector<char> live(static_cast<std::size_t>(ind.num_registers), 0);
  live[0] = 1;
  for (int i = ind.length() - 1; i >= pos; --i) {
    const auto& ins = ind.instructions[static_cast<std::size_t>(i)];
    if (!live[static_cast<std::size_t>(ins.dst)]) continue;
    live[static_cast<std::size_t>(ins.dst)] = 0;
    if (ins.src1.kind == Operand::Kind::reg) live[static_cast<std::size_t>(ins.src1.index)] = 1;
    if (ins.fun->arity == 2 && ins.src2.kind == Operand::Kind::reg)
      live[static_cast<std::size_t>(ins.src2.index)] = 1;
  }
  return live;
}

std::vector<char> mark_effective(const LinearIndividual& ind) {
  std::vector<char> mask(static_cast<std::size_t>(ind.length()), 0);
  std::vector<char> live(static_cast<std::size_t>(ind.num_registers), 0);
  live[0] = 1;
  for (int i = ind.length() - 1; i >= 0; --i) {
    const auto& ins = ind.instructions[static_cast<std::size_t>(i)];
    if (!live[static_cast<std::size_t>(ins.dst)]) continue;
    mask[static_cast<std::size_t>(i)] = 1;
    live[static_cast<std::size_t>(ins.dst)] = 0;
    if (ins.src1.kind == Operand::Kind::reg) live[static_cast<std::size_t>(ins.src1.index)] = 1;
    if (ins.fun->arity == 2 && ins.src2.kind == Operand::Kind::reg)
      live[static_cast<std::size_t>(ins.src2.index)] = 1;
  }
  return mask;
}

int effective_length(const LinearIndividual& ind) {
  const auto mask = mark_effective(ind);
  int n = 0;
  for (char m : mask) n += m != 0;
  return n;
}

LinearIndividual strip_introns(const LinearIndividual& ind) {
  const auto mask = mark_effective(ind);
  LinearIndividual out;
  out.num_registers = ind.num_registers;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.instructions.push_back(ind.instructions[i]);
  return out;
}

Dag decode_dag(const LinearIndividual& ind, const PrimitiveSet& prims) {
  const auto mask = mark_effective(ind);
  const int nf = prims.num_features();
  Dag dag;
  std::vector<int> producer(static_cast<std::size_t>(ind.num_registers), -1);
  std::vector<std::pair<std::string, int>> leaves;  // label -> node id

  auto leaf_node = [&](const std::string& label) {
    for (const auto& [l, id] : leaves)
      if (l == label) return id;
    const int id = static_cast<int>(dag.nodes.size());
    dag.nodes.push_back(DagNode{label, -1});
    leaves.emplace_back(label, id);
    return id;
  };
  auto source_node = [&](const Operand& op) {
    switch (op.kind) {
      case Operand::Kind::reg: {
        const int p = producer[static_cast<std::size_t>(op.index)];
        if (p >= 0) return p;
        // read before any effective write: the register still holds its
        // cyclically assigned input feature
        return leaf_node(prims.feature_terminal(op.index % nf).name);
      }
      case Operand::Kind::feature:
        return leaf_node(prims.feature_terminal(op.index).name);
      case Operand::Kind::constant:
        return leaf_node(Terminal::make_constant(op.value).name);
    }
    return -1;
  };

  for (int i = 0; i < ind.length(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    const auto& ins = ind.instructions[static_cast<std::size_t>(i)];
    const int id = static_cast<int>(dag.nodes.size());
    dag.nodes.push_back(DagNode{ins.fun->name, i});
    dag.edges.emplace_back(id, source_node(ins.src1));
    if (ins.fun->arity == 2) dag.edges.emplace_back(id, source_node(ins.src2));
    producer[static_cast<std::size_t>(ins.dst)] = id;
  }
  return dag;
}

Operand random_operand(Rng& rng, const PrimitiveSet& prims, const LinearParams& params) {
  Operand op;
  if (rng.bernoulli(params.operand_feature_prob)) {
    const auto& t = prims.terminals()[rng.index(prims.terminals().size())];
    if (t.kind == TerminalKind::feature) {
      op.kind = Operand::Kind::feature;
      op.index = t.feature;
    } else {
      op.kind = Operand::Kind::constant;
      op.value = t.value;
    }
  } else {
    op.kind = Operand::Kind::reg;
    op.index = static_cast<int>(rng.index(static_cast<std::size_t>(params.num_registers)));
  }
  return op;
}

Instruction random_instruction(Rng& rng, const PrimitiveSet& prims, const LinearParams& params) {
  Instruction ins;
  ins.fun = &prims.functions()[rng.index(prims.functions().size())];
  ins.dst = static_cast<int>(rng.index(static_cast<std::size_t>(params.num_registers)));
  ins.src1 = random_operand(rng, prims, params);
  if (ins.fun->arity == 2) ins.src2 = random_operand(rng, prims, params);
  return ins;
}

LinearIndividual init_linear(Rng& rng, const PrimitiveSet& prims, const LinearParams& params) {
  LinearIndividual ind;
  ind.num_registers = params.num_registers;
  const int lo = std::max(params.init_len_min, params.min_len);
  const int hi = std::min(params.init_len_max, params.max_len);
  const int len = static_cast<int>(rng.uniform_int(lo, hi));
  ind.instructions.reserve(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) ind.instructions.push_back(random_instruction(rng, prims, params));
  return ind;
}

std::pair<LinearIndividual, LinearIndividual> crossover_segments(const LinearIndividual& p1,
                                                                 const LinearIndividual& p2, int a1,
                                                                 int b1, int a2, int b2) {
  assert(0 <= a1 && a1 <= b1 && b1 <= p1.length());
  assert(0 <= a2 && a2 <= b2 && b2 <= p2.length());
  auto splice = [](const LinearIndividual& base, int a, int b, const LinearIndividual& donor, int da,
                   int db) {
    LinearIndividual c;
    c.num_registers = base.num_registers;
    auto& v = c.instructions;
    v.insert(v.end(), base.instructions.begin(), base.instructions.begin() + a);
    v.insert(v.end(), donor.instructions.begin() + da, donor.instructions.begin() + db);
    v.insert(v.end(), base.instructions.begin() + b, base.instructions.end());
    return c;
  };
  return {splice(p1, a1, b1, p2, a2, b2), splice(p2, a2, b2, p1, a1, b1)};
}

std::pair<LinearIndividual, LinearIndividual> linear_crossover(const LinearIndividual& p1,
                                                               const LinearIndividual& p2, Rng& rng,
                                                               const LinearParams& params) {
  for (int attempt = 0; attempt < params.crossover_retries; ++attempt) {
    int a1 = static_cast<int>(rng.uniform_int(0, p1.length()));
    int b1 = static_cast<int>(rng.uniform_int(0, p1.length()));
    if (a1 > b1) std::swap(a1, b1);
    int a2 = static_cast<int>(rng.uniform_int(0, p2.length()));
    int b2 = static_cast<int>(rng.uniform_int(0, p2.length()));
    if (a2 > b2) std::swap(a2, b2);
    const int l1 = p1.length() - (b1 - a1) + (b2 - a2);
    const int l2 = p2.length() - (b2 - a2) + (b1 - a1);
    if (l1 < params.min_len || l1 > params.max_len) continue;
    if (l2 < params.min_len || l2 > params.max_len) continue;
    return crossover_segments(p1, p2, a1, b1, a2, b2);
  }
  LinearIndividual c1 = p1;
  LinearIndividual c2 = p2;
  c1.fitness.reset();
  c2.fitness.reset();
  return {std::move(c1), std::move(c2)};
}

LinearIndividual effective_macro_mutation(const LinearIndividual& p, Rng& rng,
                                          const PrimitiveSet& prims, const LinearParams& params) {
  LinearIndividual c = p;
  c.fitness.reset();
  const auto mask = mark_effective(c);
  std::vector<int> eff;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) eff.push_back(static_cast<int>(i));

  const bool can_insert = c.length() < params.max_len;
  const bool can_delete = c.length() > params.min_len && !eff.empty();
  if (!can_insert && !can_delete) return c;
  const bool insert = can_insert && (!can_delete || rng.bernoulli(0.5));

  if (insert) {
    int pos = static_cast<int>(rng.uniform_int(0, c.length()));
    auto live = live_registers_at(c, pos);
    std::vector<int> live_regs;
    for (std::size_t r = 0; r < live.size(); ++r)
      if (live[r]) live_regs.push_back(static_cast<int>(r));
    if (live_regs.empty()) {
      // nothing downstream reaches R[0] from here; append instead, where R[0]
      // itself is live
      pos = c.length();
      live_regs.assign(1, 0);
    }
    Instruction ins = random_instruction(rng, prims, params);
    bool dst_live = false;
    for (int r : live_regs) dst_live = dst_live || r == ins.dst;
    if (!dst_live) ins.dst = live_regs[rng.index(live_regs.size())];
    c.instructions.insert(c.instructions.begin() + pos, ins);
  } else {
    const int idx = eff[rng.index(eff.size())];
    c.instructions.erase(c.instructions.begin() + idx);
  }
  return c;
}

LinearIndividual effective_micro_mutation(const LinearIndividual& p, Rng& rng,
                                          const PrimitiveSet& prims, const LinearParams& params) {
  LinearIndividual c = p;
  c.fitness.reset();
  const auto mask = mark_effective(c);
  std::vector<int> eff;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) eff.push_back(static_cast<int>(i));
  if (eff.empty()) return c;

  Instruction& ins = c.instructions[static_cast<std::size_t>(eff[rng.index(eff.size())])];

  std::vector<const Function*> fun_alts;
  for (const auto& f : prims.functions())
    if (f.arity == ins.fun->arity && f.name != ins.fun->name) fun_alts.push_back(&f);

  enum Component { fun_c, dst_c, src_c };
  std::vector<Component> avail;
  if (!fun_alts.empty()) avail.push_back(fun_c);
  if (params.num_registers > 1) avail.push_back(dst_c);
  avail.push_back(src_c);

  switch (avail[rng.index(avail.size())]) {
    case fun_c:
      ins.fun = fun_alts[rng.index(fun_alts.size())];
      break;
    case dst_c: {
      int d = ins.dst;
      while (d == ins.dst) d = static_cast<int>(rng.index(static_cast<std::size_t>(params.num_registers)));
      ins.dst = d;
      break;
    }
    case src_c: {
      Operand* slot = &ins.src1;
      if (ins.fun->arity == 2 && rng.bernoulli(0.5)) slot = &ins.src2;
      for (int tries = 0; tries < 32; ++tries) {
        const Operand cand = random_operand(rng, prims, params);
        if (!(cand == *slot)) {
          *slot = cand;
          break;
        }
      }
      break;
    }
  }
  return c;
}

}  // namespace mrgp
