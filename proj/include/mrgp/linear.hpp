#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrgp/primitives.hpp"
#include "mrgp/rng.hpp"

namespace mrgp {

// One source operand of a register-machine instruction.
struct Operand {
  enum class Kind { reg, feature, constant };
  Kind kind = Kind::reg;
  int index = 0;       // register or feature index
  double value = 0.0;  // constant

  bool operator==(const Operand& o) const {
    return kind == o.kind && index == o.index && value == o.value;
  }
};

// R[dst] = fun(src1[, src2]); src2 is ignored for unary functions.
struct Instruction {
  int dst = 0;
  const Function* fun = nullptr;
  Operand src1, src2;

  bool operator==(const Instruction& o) const {
    if (dst != o.dst || fun->name != o.fun->name || !(src1 == o.src1)) return false;
    return fun->arity == 1 || src2 == o.src2;
  }
};

// Imperative genome. Output is R[0]; registers start as R[i] = input[i mod n].
struct LinearIndividual {
  std::vector<Instruction> instructions;
  int num_registers = 8;
  std::optional<double> fitness;

  int length() const { return static_cast<int>(instructions.size()); }
};

struct LinearParams {
  int min_len = 1;
  int max_len = 100;
  int num_registers = 8;
  int init_len_min = 5;
  int init_len_max = 20;
  double operand_feature_prob = 0.5;  // feature vs register when drawing a source
  int crossover_retries = 10;
};

double eval_linear(const LinearIndividual& ind, std::span<const double> inputs);

// Structural intron analysis: mask[i] is true iff instruction i can influence
// the final value of R[0]. Backward live-register sweep.
std::vector<char> mark_effective(const LinearIndividual& ind);

// Registers live just before instruction `pos` executes, i.e. the live set the
// backward sweep carries when it reaches `pos` (pos == length() gives {R0}).
std::vector<char> live_registers_at(const LinearIndividual& ind, int pos);

int effective_length(const LinearIndividual& ind);

// Copy with all introns removed (semantics on R[0] preserved).
LinearIndividual strip_introns(const LinearIndividual& ind);

// Data-flow graph of the effective code: one node per effective instruction
// plus one shared node per distinct leaf operand. Edges run consumer -> producer.
struct DagNode {
  std::string label;      // function or terminal symbol
  int instr_index = -1;   // -1 for leaf nodes
};
struct Dag {
  std::vector<DagNode> nodes;
  std::vector<std::pair<int, int>> edges;  // (consumer, producer) node ids
};
Dag decode_dag(const LinearIndividual& ind, const PrimitiveSet& prims);

Operand random_operand(Rng& rng, const PrimitiveSet& prims, const LinearParams& params);
Instruction random_instruction(Rng& rng, const PrimitiveSet& prims, const LinearParams& params);

LinearIndividual init_linear(Rng& rng, const PrimitiveSet& prims, const LinearParams& params);

// Deterministic core: exchange segments [a1,b1) of p1 and [a2,b2) of p2.
std::pair<LinearIndividual, LinearIndividual> crossover_segments(const LinearIndividual& p1,
                                                                 const LinearIndividual& p2, int a1,
                                                                 int b1, int a2, int b2);

// Two-point segment swap; resamples cut points up to crossover_retries times
// until both children satisfy the length bounds, else returns parent copies.
std::pair<LinearIndividual, LinearIndividual> linear_crossover(const LinearIndividual& p1,
                                                               const LinearIndividual& p2, Rng& rng,
                                                               const LinearParams& params);

// Insert a random (made effective) instruction or delete a random effective
// one, 50/50 where both are possible within the length bounds.
LinearIndividual effective_macro_mutation(const LinearIndividual& p, Rng& rng,
                                          const PrimitiveSet& prims, const LinearParams& params);

// Replace one component (function, destination, or one source) of a uniformly
// chosen effective instruction; all-intron parents come back unchanged.
LinearIndividual effective_micro_mutation(const LinearIndividual& p, Rng& rng,
                                          const PrimitiveSet& prims, const LinearParams& params);

}  // namespace mrgp
