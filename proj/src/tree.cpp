#include "mrgp/tree.hpp"

#include <cassert>
#include <stdexcept>

namespace mrgp {

std::unique_ptr<TreeNode> TreeNode::clone() const {
  auto n = std::make_unique<TreeNode>();
  n->fun = fun;
  n->leaf = leaf;
  n->kids.reserve(kids.size());
  for (const auto& k : kids) n->kids.push_back(k->clone());
  return n;
}

std::unique_ptr<TreeNode> TreeNode::make_leaf(Terminal t) {
  auto n = std::make_unique<TreeNode>();
  n->leaf = std::move(t);
  return n;
}

std::unique_ptr<TreeNode> TreeNode::make(const Function* f,
                                         std::vector<std::unique_ptr<TreeNode>> kids) {
  assert(f != nullptr && static_cast<int>(kids.size()) == f->arity);
  auto n = std::make_unique<TreeNode>();
  n->fun = f;
  n->kids = std::move(kids);
  return n;
}

int node_count(const TreeNode& n) {
  int c = 1;
  for (const auto& k : n.kids) c += node_count(*k);
  return c;
}

int depth(const TreeNode& n) {
  int d = 0;
  for (const auto& k : n.kids) d = std::max(d, depth(*k));
  return d + 1;
}

bool tree_equal(const TreeNode& a, const TreeNode& b) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return a.leaf == b.leaf;
  if (a.fun->name != b.fun->name || a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!tree_equal(*a.kids[i], *b.kids[i])) return false;
  return true;
}

double eval_tree(const TreeNode& n, std::span<const double> inputs) {
  if (n.is_leaf()) {
    if (n.leaf.kind == TerminalKind::constant) return n.leaf.value;
    const auto idx = static_cast<std::size_t>(n.leaf.feature);
    if (idx >= inputs.size())
      throw std::out_of_range("tree references feature x" + std::to_string(n.leaf.feature + 1) +
                              " but only " + std::to_string(inputs.size()) + " inputs given");
    return inputs[idx];
  }
  const double a = eval_tree(*n.kids[0], inputs);
  const double b = n.fun->arity == 2 ? eval_tree(*n.kids[1], inputs) : 0.0;
  return apply(*n.fun, a, b);
}

double eval_tree(const TreeIndividual& ind, std::span<const double> inputs) {
  assert(ind.root);
  return eval_tree(*ind.root, inputs);
}

namespace {

void collect_rec(TreeNode& n, TreeNode* parent, int slot, int d, std::vector<NodeRef>& out) {
  out.push_back(NodeRef{&n, parent, slot, d});
  for (std::size_t i = 0; i < n.kids.size(); ++i)
    collect_rec(*n.kids[i], &n, static_cast<int>(i), d + 1, out);
}

void replace_at(TreeIndividual& ind, const NodeRef& ref, std::unique_ptr<TreeNode> sub) {
  if (ref.parent == nullptr)
    ind.root = std::move(sub);
  else
    ref.parent->kids[static_cast<std::size_t>(ref.slot)] = std::move(sub);
}

// crossover-point choice with the classic inner-node bias
std::size_t pick_point(const std::vector<NodeRef>& refs, Rng& rng, const TreeParams& params) {
  if (params.uniform_points || refs.size() == 1) return rng.index(refs.size());
  std::vector<std::size_t> inner, leaves;
  for (std::size_t i = 0; i < refs.size(); ++i)
    (refs[i].node->is_leaf() ? leaves : inner).push_back(i);
  if (inner.empty()) return leaves[rng.index(leaves.size())];
  if (leaves.empty() || !rng.bernoulli(params.leaf_point_prob))
    return inner[rng.index(inner.size())];
  return leaves[rng.index(leaves.size())];
}

std::unique_ptr<TreeNode> full_subtree(Rng& rng, const PrimitiveSet& prims, int target_depth) {
  if (target_depth <= 1) {
    const auto& terms = prims.terminals();
    return TreeNode::make_leaf(terms[rng.index(terms.size())]);
  }
  const auto& fns = prims.functions();
  const Function* f = &fns[rng.index(fns.size())];
  std::vector<std::unique_ptr<TreeNode>> kids;
  for (int i = 0; i < f->arity; ++i) kids.push_back(full_subtree(rng, prims, target_depth - 1));
  return TreeNode::make(f, std::move(kids));
}

}  // namespace

std::vector<NodeRef> collect_nodes(TreeNode& root) {
  std::vector<NodeRef> out;
  collect_rec(root, nullptr, -1, 1, out);
  return out;
}

NodeRef random_inner_node(TreeNode& root, Rng& rng) {
  auto refs = collect_nodes(root);
  std::vector<std::size_t> inner;
  for (std::size_t i = 0; i < refs.size(); ++i)
    if (!refs[i].node->is_leaf()) inner.push_back(i);
  if (inner.empty()) return refs[0];
  return refs[inner[rng.index(inner.size())]];
}

std::unique_ptr<TreeNode> random_subtree(Rng& rng, const PrimitiveSet& prims, int max_depth) {
  assert(max_depth >= 1);
  const auto& fns = prims.functions();
  const auto& terms = prims.terminals();
  const std::size_t total = fns.size() + terms.size();
  if (max_depth <= 1) return TreeNode::make_leaf(terms[rng.index(terms.size())]);
  const std::size_t pick = rng.index(total);
  if (pick >= fns.size()) return TreeNode::make_leaf(terms[pick - fns.size()]);
  const Function* f = &fns[pick];
  std::vector<std::unique_ptr<TreeNode>> kids;
  for (int i = 0; i < f->arity; ++i) kids.push_back(random_subtree(rng, prims, max_depth - 1));
  return TreeNode::make(f, std::move(kids));
}

TreeIndividual init_tree(Rng& rng, const PrimitiveSet& prims, const TreeParams& params) {
  const int hi = std::min(params.init_depth_max, params.max_depth);
  const int lo = std::min(params.init_depth_min, hi);
  const int target = static_cast<int>(rng.uniform_int(lo, hi));
  const bool full = rng.bernoulli(0.5);
  return TreeIndividual(full ? full_subtree(rng, prims, target) : random_subtree(rng, prims, target));
}

std::pair<TreeIndividual, TreeIndividual> crossover_at(const TreeIndividual& p1,
                                                       const TreeIndividual& p2, std::size_t i1,
                                                       std::size_t i2, int max_depth) {
  TreeIndividual c1 = p1;
  TreeIndividual c2 = p2;
  c1.fitness.reset();
  c2.fitness.reset();
  auto refs1 = collect_nodes(*c1.root);
  auto refs2 = collect_nodes(*c2.root);
  assert(i1 < refs1.size() && i2 < refs2.size());
  auto sub1 = refs1[i1].node->clone();
  auto sub2 = refs2[i2].node->clone();
  replace_at(c1, refs1[i1], std::move(sub2));
  replace_at(c2, refs2[i2], std::move(sub1));
  if (depth(*c1.root) > max_depth) {
    c1 = p1;
    c1.fitness.reset();
  }
  if (depth(*c2.root) > max_depth) {
    c2 = p2;
    c2.fitness.reset();
  }
  return {std::move(c1), std::move(c2)};
}

std::pair<TreeIndividual, TreeIndividual> subtree_crossover(const TreeIndividual& p1,
                                                            const TreeIndividual& p2, Rng& rng,
                                                            const TreeParams& params) {
  auto refs1 = collect_nodes(*const_cast<TreeIndividual&>(p1).root);
  auto refs2 = collect_nodes(*const_cast<TreeIndividual&>(p2).root);
  const std::size_t i1 = pick_point(refs1, rng, params);
  const std::size_t i2 = pick_point(refs2, rng, params);
  return crossover_at(p1, p2, i1, i2, params.max_depth);
}

TreeIndividual mutate_at(const TreeIndividual& p, std::size_t index, Rng& rng,
                         const PrimitiveSet& prims, const TreeParams& params) {
  TreeIndividual c = p;
  c.fitness.reset();
  auto refs = collect_nodes(*c.root);
  assert(index < refs.size());
  const int budget = std::max(1, params.max_depth - refs[index].depth + 1);
  replace_at(c, refs[index], random_subtree(rng, prims, budget));
  return c;
}

TreeIndividual subtree_mutation(const TreeIndividual& p, Rng& rng, const PrimitiveSet& prims,
                                const TreeParams& params) {
  auto refs = collect_nodes(*const_cast<TreeIndividual&>(p).root);
  return mutate_at(p, rng.index(refs.size()), rng, prims, params);
}

}  // namespace mrgp
