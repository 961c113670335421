#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mrgp/primitives.hpp"
#include "mrgp/rng.hpp"

namespace mrgp {

// Expression-tree genome. Leaves carry a Terminal by value; inner nodes point
// at a Function owned by the primitive set. Root has depth 1.
struct TreeNode {
  const Function* fun = nullptr;  // nullptr => leaf
  Terminal leaf;
  std::vector<std::unique_ptr<TreeNode>> kids;

  bool is_leaf() const { return fun == nullptr; }
  std::unique_ptr<TreeNode> clone() const;

  static std::unique_ptr<TreeNode> make_leaf(Terminal t);
  static std::unique_ptr<TreeNode> make(const Function* f,
                                        std::vector<std::unique_ptr<TreeNode>> kids);
};

struct TreeIndividual {
  std::unique_ptr<TreeNode> root;
  std::optional<double> fitness;

  TreeIndividual() = default;
  explicit TreeIndividual(std::unique_ptr<TreeNode> r) : root(std::move(r)) {}
  TreeIndividual(const TreeIndividual& o)
      : root(o.root ? o.root->clone() : nullptr), fitness(o.fitness) {}
  TreeIndividual& operator=(const TreeIndividual& o) {
    if (this != &o) {
      root = o.root ? o.root->clone() : nullptr;
      fitness = o.fitness;
    }
    return *this;
  }
  TreeIndividual(TreeIndividual&&) = default;
  TreeIndividual& operator=(TreeIndividual&&) = default;
};

struct TreeParams {
  int max_depth = 10;
  int init_depth_min = 2;
  int init_depth_max = 6;
  // probability that a crossover point is drawn from the leaves rather than
  // the inner nodes (classic 90/10 bias); set uniform_points to ignore it
  double leaf_point_prob = 0.10;
  bool uniform_points = false;
};

int node_count(const TreeNode& n);
int depth(const TreeNode& n);
bool tree_equal(const TreeNode& a, const TreeNode& b);

double eval_tree(const TreeNode& n, std::span<const double> inputs);
double eval_tree(const TreeIndividual& ind, std::span<const double> inputs);

// Pre-order listing of all nodes with replacement context.
struct NodeRef {
  TreeNode* node;
  TreeNode* parent;  // nullptr at root
  int slot;          // index in parent->kids
  int depth;         // root = 1
};
std::vector<NodeRef> collect_nodes(TreeNode& root);

// Uniform choice over inner (function) nodes; a lone-terminal tree yields the
// root itself.
NodeRef random_inner_node(TreeNode& root, Rng& rng);

// Grow-style random subtree of depth <= max_depth (>= 1); depth-1 budget
// forces a single terminal.
std::unique_ptr<TreeNode> random_subtree(Rng& rng, const PrimitiveSet& prims, int max_depth);

// Ramped half-and-half: target depth uniform in [init_depth_min,
// min(init_depth_max, max_depth)], full- or grow-style with equal probability.
TreeIndividual init_tree(Rng& rng, const PrimitiveSet& prims, const TreeParams& params);

// Deterministic core: swap the subtrees at pre-order node indices i1/i2.
// Offspring deeper than max_depth are replaced by a copy of their base parent.
std::pair<TreeIndividual, TreeIndividual> crossover_at(const TreeIndividual& p1,
                                                       const TreeIndividual& p2, std::size_t i1,
                                                       std::size_t i2, int max_depth);

std::pair<TreeIndividual, TreeIndividual> subtree_crossover(const TreeIndividual& p1,
                                                            const TreeIndividual& p2, Rng& rng,
                                                            const TreeParams& params);

// Replace the node at pre-order index with a fresh random subtree fitting the
// depth limit.
TreeIndividual mutate_at(const TreeIndividual& p, std::size_t index, Rng& rng,
                         const PrimitiveSet& prims, const TreeParams& params);

TreeIndividual subtree_mutation(const TreeIndividual& p, Rng& rng, const PrimitiveSet& prims,
                                const TreeParams& params);

}  // namespace mrgp
