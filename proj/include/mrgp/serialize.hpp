#pragma once

#include <string>

#include "mrgp/individual.hpp"
#include "mrgp/xrep.hpp"

namespace mrgp {

// shortest exact decimal form (round-trips through parsing)
std::string format_double(double v);

// prefix s-expression: (+ x1 (- x1 x3)); a lone terminal prints bare
std::string serialize_tree(const TreeNode& n);
std::string serialize_tree(const TreeIndividual& ind);

// one instruction per line: R[1] = -(x1, x3)
std::string serialize_linear(const LinearIndividual& ind, const PrimitiveSet& prims);

std::string serialize_individual(const Individual& ind, const PrimitiveSet& prims);

// ([+, [x1, +]] [+, [x2, -]] [-, [x1, x3]]); holes print as _
std::string format_adjacency(const AdjacencyList& list);

// Parsers resolve symbols against the given primitive set; unknown symbols,
// arity violations and malformed syntax throw std::runtime_error with a
// description of the offending token or line.
TreeIndividual parse_tree(const std::string& text, const PrimitiveSet& prims);
LinearIndividual parse_linear(const std::string& text, const PrimitiveSet& prims,
                              int num_registers = 0);  // 0: infer as max index + 1

// Detects the representation from the text shape ('(' => tree, 'R[' => linear).
Individual parse_individual(const std::string& text, const PrimitiveSet& prims);

}  // namespace mrgp
