#pragma once

#include "mrgp/individual.hpp"
#include "mrgp/primitives.hpp"
#include "mrgp/rng.hpp"

namespace mrgp {

// Adjacency lists are the exchange medium between the two representations:
// an ordered list of [function, adjacent-symbols] entries that records which
// primitives feed which, by symbol rather than by node identity.
struct AdjSlot {
  enum class Kind { function, terminal, hole };
  Kind kind = Kind::hole;
  const Function* fun = nullptr;  // kind == function
  Terminal term;                  // kind == terminal

  static AdjSlot make_function(const Function* f) { return AdjSlot{Kind::function, f, {}}; }
  static AdjSlot make_terminal(Terminal t) { return AdjSlot{Kind::terminal, nullptr, std::move(t)}; }
  static AdjSlot make_hole() { return AdjSlot{}; }

  bool operator==(const AdjSlot& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::function) return fun->name == o.fun->name;
    if (kind == Kind::terminal) return term == o.term;
    return true;
  }
};

struct AdjEntry {
  const Function* fun = nullptr;
  std::vector<AdjSlot> adj;  // exactly fun->arity slots

  bool operator==(const AdjEntry& o) const { return fun->name == o.fun->name && adj == o.adj; }
};

struct AdjacencyList {
  std::vector<AdjEntry> entries;

  bool operator==(const AdjacencyList& o) const { return entries == o.entries; }
};

// Pre-order walk over the function nodes; a lone terminal yields an empty list.
AdjacencyList tree_to_adjacency(const TreeNode& root);

// One entry per instruction of [begin, begin+len), listed in reverse
// instruction order so the segment's final computation comes first. A register
// source resolves to the function symbol of its most recent writer inside the
// segment; sources produced outside the segment become holes.
AdjacencyList segment_to_adjacency(const LinearIndividual& ind, int begin, int len,
                                   const PrimitiveSet& prims);

// Rebuild a subtree from an adjacency list, rooted at entry `index`, starting
// at depth `depth` (root of the whole tree = depth 1) under limit max_depth.
// Unmatched function adjacents and exhausted depth fall back to random
// material; terminal adjacents attach verbatim; holes become random terminals.
std::unique_ptr<TreeNode> grow_tree_from_adjacency(const AdjacencyList& list, int depth,
                                                   std::size_t index, int max_depth, Rng& rng,
                                                   const PrimitiveSet& prims);

// Rebuild instructions from a donor adjacency list inside `base`: |removed|
// random instructions are deleted from the window [t1, t1+n1), the donor's
// entries are inserted (in reverse, so the list head ends up last) at a random
// point of the shrunk window, and a top-down pass re-wires destinations and
// sources so the block becomes effective, connected code where possible.
LinearIndividual grow_instructions_from_adjacency(const LinearIndividual& base,
                                                  const AdjacencyList& removed,
                                                  const AdjacencyList& donor, int t1, int n1,
                                                  Rng& rng, const PrimitiveSet& prims,
                                                  const LinearParams& params);

struct CalxParams {
  TreeParams tree;
  LinearParams linear;
  int max_segment_len = 10;
};

// Cross-representation adjacency-list crossover. The offspring always has the
// recipient's representation; a linear recipient that would leave the length
// bounds reverts to an exact copy of the recipient parent.
Individual calx(const Individual& recipient, const Individual& donor, Rng& rng,
                const PrimitiveSet& prims, const CalxParams& params);

}  // namespace mrgp
