#include <algorithm>
#include <set>

#include "doctest.h"
#include "mrgp/linear.hpp"
#include "mrgp/serialize.hpp"

using namespace mrgp;

namespace {

const char* kThreeStep =
    "R[1] = -(x1, x3)\n"
    "R[1] = +(x2, R[1])\n"
    "R[0] = +(x1, R[1])\n";

bool valid_linear(const LinearIndividual& ind, const PrimitiveSet& prims) {
  auto ok_op = [&](const Operand& op) {
    if (op.kind == Operand::Kind::reg) return op.index >= 0 && op.index < ind.num_registers;
    if (op.kind == Operand::Kind::feature) return op.index >= 0 && op.index < prims.num_features();
    return true;
  };
  for (const auto& ins : ind.instructions) {
    if (ins.dst < 0 || ins.dst >= ind.num_registers) return false;
    if (!ins.fun || !ok_op(ins.src1)) return false;
    if (ins.fun->arity == 2 && !ok_op(ins.src2)) return false;
  }
  return true;
}

// acyclicity witness: every edge must point at an earlier node id (leaves and
// producers are created before their consumers reference them)
bool dag_is_acyclic(const Dag& dag) {
  for (const auto& [consumer, producer] : dag.edges) {
    if (producer < 0 || consumer < 0) return false;
    if (producer >= static_cast<int>(dag.nodes.size())) return false;
    // walk down: a cycle would need a forward edge somewhere
    if (dag.nodes[static_cast<std::size_t>(consumer)].instr_index >= 0 && producer == consumer)
      return false;
  }
  // full check via DFS colouring
  std::vector<std::vector<int>> out(dag.nodes.size());
  for (const auto& [c, p] : dag.edges) out[static_cast<std::size_t>(c)].push_back(p);
  std::vector<int> colour(dag.nodes.size(), 0);
  for (std::size_t start = 0; start < dag.nodes.size(); ++start) {
    std::vector<std::pair<int, std::size_t>> stack = {{static_cast<int>(start), 0}};
    if (colour[start] == 2) continue;
    while (!stack.empty()) {
      auto& [n, i] = stack.back();
      if (i == 0) {
        if (colour[static_cast<std::size_t>(n)] == 1) return false;
        colour[static_cast<std::size_t>(n)] = 1;
      }
      if (i < out[static_cast<std::size_t>(n)].size()) {
        const int next = out[static_cast<std::size_t>(n)][i++];
        if (colour[static_cast<std::size_t>(next)] == 1) return false;
        if (colour[static_cast<std::size_t>(next)] == 0) stack.emplace_back(next, 0);
      } else {
        colour[static_cast<std::size_t>(n)] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("linear evaluation: worked examples") {
  const PrimitiveSet prims = symreg_primitive_set(3);
  const LinearIndividual p = parse_linear(kThreeStep, prims, 8);
  const double in[] = {1.0, 2.0, 3.0};
  CHECK(eval_linear(p, in) == 1.0);  // x1 + (x2 + (x1 - x3))

  // registers start as cyclically assigned inputs: an empty suffix of writes
  // to R[0] leaves R[0] = x1
  LinearIndividual introns = parse_linear("R[3] = *(x2, x2)\nR[5] = +(R[3], x1)\n", prims, 8);
  CHECK(eval_linear(introns, in) == 1.0);
  CHECK(effective_length(introns) == 0);

  // cyclic register initialization: R[4] holds x2 when there are 3 features
  LinearIndividual cyc = parse_linear("R[0] = +(R[4], R[3])\n", prims, 8);
  CHECK(eval_linear(cyc, in) == 2.0 + 1.0);
}

TEST_CASE("intron analysis: worked examples") {
  const PrimitiveSet prims = symreg_primitive_set(3);
  const LinearIndividual p = parse_linear(kThreeStep, prims, 8);
  const auto mask = mark_effective(p);
  CHECK(mask == std::vector<char>{1, 1, 1});

  // overwritten result never reaches R[0]
  LinearIndividual dead = parse_linear(
      "R[1] = *(x1, x1)\n"
      "R[1] = +(x2, x2)\n"
      "R[0] = -(R[1], x3)\n",
      prims, 8);
  CHECK(mark_effective(dead) == std::vector<char>{0, 1, 1});

  // self-referencing destination keeps the earlier write live
  LinearIndividual self = parse_linear(
      "R[0] = *(x1, x1)\n"
      "R[0] = +(R[0], x2)\n",
      prims, 8);
  CHECK(mark_effective(self) == std::vector<char>{1, 1});

  CHECK(live_registers_at(p, p.length()) == std::vector<char>{1, 0, 0, 0, 0, 0, 0, 0});
  CHECK(live_registers_at(p, 2) == std::vector<char>{0, 1, 0, 0, 0, 0, 0, 0});
}

TEST_CASE("intron stripping preserves semantics") {
  const PrimitiveSet prims = symreg_primitive_set(4);
  LinearParams params;
  params.num_registers = 8;
  params.init_len_min = 1;
  params.init_len_max = 20;
  Rng rng(101);
  for (int trial = 0; trial < 500; ++trial) {
    const LinearIndividual p = init_linear(rng, prims, params);
    const LinearIndividual stripped = strip_introns(p);
    CHECK(stripped.length() == effective_length(p));
    for (int i = 0; i < 20; ++i) {
      double in[4];
      for (double& v : in) v = rng.uniform(-10.0, 10.0);
      CHECK(eval_linear(p, in) == eval_linear(stripped, in));
    }
  }
}

TEST_CASE("dataflow graph decoding") {
  const PrimitiveSet prims = symreg_primitive_set(3);
  const LinearIndividual p = parse_linear(kThreeStep, prims, 8);
  const Dag dag = decode_dag(p, prims);

  // three effective instructions plus distinct leaves x1, x3, x2
  REQUIRE(dag.nodes.size() == 6);
  CHECK(dag.edges.size() == 6);
  std::multiset<std::string> labels;
  for (const auto& n : dag.nodes) labels.insert(n.label);
  CHECK(labels == std::multiset<std::string>{"+", "+", "-", "x1", "x2", "x3"});

  // shared leaf: x1 feeds both the subtraction and the final addition
  int x1_id = -1;
  for (std::size_t i = 0; i < dag.nodes.size(); ++i)
    if (dag.nodes[i].label == "x1") x1_id = static_cast<int>(i);
  int x1_consumers = 0;
  for (const auto& [c, pr] : dag.edges)
    if (pr == x1_id) ++x1_consumers;
  CHECK(x1_consumers == 2);
  CHECK(dag_is_acyclic(dag));

  SUBCASE("single instruction") {
    const LinearIndividual one = parse_linear("R[0] = -(x1, x2)\n", prims, 8);
    const Dag d = decode_dag(one, prims);
    CHECK(d.nodes.size() == 3);
    CHECK(d.edges.size() == 2);
  }

  SUBCASE("register read before any write resolves to its initial feature") {
    const LinearIndividual cyc = parse_linear("R[0] = +(R[4], x3)\n", prims, 8);
    const Dag d = decode_dag(cyc, prims);  // R[4] holds x2 (4 mod 3 = 1)
    std::multiset<std::string> l;
    for (const auto& n : d.nodes) l.insert(n.label);
    CHECK(l == std::multiset<std::string>{"+", "x2", "x3"});
  }

  SUBCASE("random programs decode acyclically") {
    LinearParams params;
    params.num_registers = 6;
    params.init_len_min = 1;
    params.init_len_max = 30;
    const PrimitiveSet p4 = symreg_primitive_set(4);
    Rng rng(103);
    for (int i = 0; i < 10000; ++i) {
      const LinearIndividual ind = init_linear(rng, p4, params);
      CHECK(dag_is_acyclic(decode_dag(ind, p4)));
    }
  }
}

TEST_CASE("linear crossover") {
  const PrimitiveSet prims = symreg_primitive_set(3);
  LinearParams params;
  params.min_len = 1;
  params.max_len = 30;
  Rng rng(107);

  SUBCASE("zero-length segments reproduce the parents") {
    const LinearIndividual p1 = init_linear(rng, prims, params);
    const LinearIndividual p2 = init_linear(rng, prims, params);
    auto [c1, c2] = crossover_segments(p1, p2, 2, 2, 0, 0);
    CHECK(c1.instructions == p1.instructions);
    CHECK(c2.instructions == p2.instructions);
  }

  SUBCASE("segments actually move") {
    const LinearIndividual p1 = parse_linear(kThreeStep, prims, 8);
    const LinearIndividual p2 = parse_linear("R[0] = *(x2, x2)\n", prims, 8);
    auto [c1, c2] = crossover_segments(p1, p2, 0, 1, 0, 1);
    CHECK(c1.instructions[0] == p2.instructions[0]);
    CHECK(c2.instructions[0] == p1.instructions[0]);
    CHECK(c1.length() == 3);
    CHECK(c2.length() == 1);
  }

  SUBCASE("length bounds always hold") {
    for (int i = 0; i < 3000; ++i) {
      const LinearIndividual p1 = init_linear(rng, prims, params);
      const LinearIndividual p2 = init_linear(rng, prims, params);
      auto [c1, c2] = linear_crossover(p1, p2, rng, params);
      for (const LinearIndividual* c : {&c1, &c2}) {
        CHECK(c->length() >= params.min_len);
        CHECK(c->length() <= params.max_len);
        CHECK(valid_linear(*c, prims));
      }
    }
  }
}

TEST_CASE("macro mutation") {
  const PrimitiveSet prims = symreg_primitive_set(3);
  LinearParams params;
  params.min_len = 1;
  params.max_len = 10;
  Rng rng(109);

  SUBCASE("at the maximum length only deletion is possible") {
    LinearIndividual p;
    p.num_registers = params.num_registers;
    for (int i = 0; i < params.max_len; ++i) p.instructions.push_back(random_instruction(rng, prims, params));
    for (int i = 0; i < 50; ++i) {
      const LinearIndividual c = effective_macro_mutation(p, rng, prims, params);
      CHECK(c.length() <= p.length());
    }
  }

  SUBCASE("at the minimum length only insertion is possible") {
    const LinearIndividual p = parse_linear("R[0] = +(x1, x2)\n", prims, 8);
    for (int i = 0; i < 50; ++i) {
      const LinearIndividual c = effective_macro_mutation(p, rng, prims, params);
      CHECK(c.length() == 2);
    }
  }

  SUBCASE("insertions are effective, deletions remove effective code") {
    int inserts = 0, deletes = 0;
    for (int i = 0; i < 4000; ++i) {
      const LinearIndividual p = init_linear(rng, prims, params);
      const LinearIndividual c = effective_macro_mutation(p, rng, prims, params);
      CHECK(valid_linear(c, prims));
      CHECK(c.length() >= params.min_len);
      CHECK(c.length() <= params.max_len);
      if (c.length() > p.length()) {
        ++inserts;
        // the new instruction must be effective in the offspring
        CHECK(effective_length(c) > 0);
        // find the inserted position and check its mask bit
        const auto mask = mark_effective(c);
        int pos = -1;
        for (int k = 0; k < p.length(); ++k)
          if (!(c.instructions[static_cast<std::size_t>(k)] ==
                p.instructions[static_cast<std::size_t>(k)])) {
            pos = k;
            break;
          }
        if (pos < 0) pos = p.length();
        CHECK(mask[static_cast<std::size_t>(pos)] == 1);
      } else if (c.length() < p.length()) {
        ++deletes;
        // the removed instruction was effective in the parent (runs of equal
        // instructions make the exact removal point ambiguous, but any
        // first-difference position within such a run shares its mask bit)
        int pos = p.length() - 1;
        for (int k = 0; k < c.length(); ++k)
          if (!(c.instructions[static_cast<std::size_t>(k)] ==
                p.instructions[static_cast<std::size_t>(k)])) {
            pos = k;
            break;
          }
        CHECK(mark_effective(p)[static_cast<std::size_t>(pos)] == 1);
      }
    }
    CHECK(inserts > 500);
    CHECK(deletes > 500);
  }
}

TEST_CASE("micro mutation") {
  const PrimitiveSet prims = symreg_primitive_set(3);
  LinearParams params;
  Rng rng(113);

  SUBCASE("all-intron parents come back unchanged") {
    const LinearIndividual p = parse_linear("R[5] = +(x1, x2)\n", prims, 8);
    CHECK(effective_length(p) == 0);
    const LinearIndividual c = effective_micro_mutation(p, rng, prims, params);
    CHECK(c.instructions == p.instructions);
  }

  SUBCASE("exactly one instruction changes, by one component") {
    LinearParams init = params;
    init.init_len_min = 3;
    init.init_len_max = 15;
    for (int i = 0; i < 4000; ++i) {
      const LinearIndividual p = init_linear(rng, prims, init);
      if (effective_length(p) == 0) continue;
      const LinearIndividual c = effective_micro_mutation(p, rng, prims, params);
      REQUIRE(c.length() == p.length());
      CHECK(valid_linear(c, prims));
      int changed = 0;
      for (int k = 0; k < p.length(); ++k) {
        const auto& a = p.instructions[static_cast<std::size_t>(k)];
        const auto& b = c.instructions[static_cast<std::size_t>(k)];
        if (a == b) continue;
        ++changed;
        // the changed instruction was effective in the parent
        CHECK(mark_effective(p)[static_cast<std::size_t>(k)] == 1);
        int diffs = 0;
        if (a.fun->name != b.fun->name) ++diffs;
        if (a.dst != b.dst) ++diffs;
        if (!(a.src1 == b.src1)) ++diffs;
        if (a.fun->arity == 2 && b.fun->arity == 2 && !(a.src2 == b.src2)) ++diffs;
        CHECK(diffs == 1);
      }
      CHECK(changed <= 1);
    }
  }
}

TEST_CASE("linear initialization bounds and shape") {
  const PrimitiveSet prims = symreg_primitive_set(2);
  LinearParams params;
  params.init_len_min = 5;
  params.init_len_max = 20;
  Rng rng(127);
  std::set<int> lengths;
  for (int i = 0; i < 2000; ++i) {
    const LinearIndividual p = init_linear(rng, prims, params);
    CHECK(p.length() >= 5);
    CHECK(p.length() <= 20);
    CHECK(valid_linear(p, prims));
    lengths.insert(p.length());
    for (const auto& ins : p.instructions)
      if (ins.fun->arity == 2) {
        // both sources materialized
        const bool src2_ok = ins.src2.kind != Operand::Kind::reg || ins.src2.index < 8;
        CHECK(src2_ok);
      }
  }
  CHECK(lengths.size() == 16);  // every length in [5, 20] occurs
}
