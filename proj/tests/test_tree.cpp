#include <cmath>

#include "doctest.h"
#include "mrgp/serialize.hpp"
#include "mrgp/tree.hpp"

using namespace mrgp;

namespace {

bool valid_tree(const TreeNode& n) {
  if (n.is_leaf()) return n.kids.empty();
  if (static_cast<int>(n.kids.size()) != n.fun->arity) return false;
  for (const auto& k : n.kids)
    if (!valid_tree(*k)) return false;
  return true;
}

}  // namespace

TEST_CASE("tree evaluation: worked examples") {
  const PrimitiveSet prims = symreg_primitive_set(3);
  const TreeIndividual t = parse_tree("(+ x1 (+ x2 (- x1 x3)))", prims);
  const double in[] = {1.0, 2.0, 3.0};
  CHECK(eval_tree(t, in) == 1.0);
  CHECK(node_count(*t.root) == 7);
  CHECK(depth(*t.root) == 4);

  const TreeIndividual leaf = parse_tree("x1", prims);
  const double seven[] = {7.0, 0.0, 0.0};
  CHECK(eval_tree(leaf, seven) == 7.0);
  CHECK(depth(*leaf.root) == 1);

  const TreeIndividual div = parse_tree("(/ x1 x2)", prims);
  const double by_zero[] = {5.0, 0.0, 0.0};
  CHECK(eval_tree(div, by_zero) == 1.0);

  // out-of-range feature reference is a hard error
  const double short_in[] = {1.0};
  CHECK_THROWS_AS(eval_tree(t, short_in), std::out_of_range);
}

TEST_CASE("ramped half-and-half initialization") {
  const PrimitiveSet prims = symreg_primitive_set(2);
  Rng rng(7);
  TreeParams params;
  params.init_depth_min = 2;
  params.init_depth_max = 6;

  int lone_terminals = 0, full_depth_hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const TreeIndividual t = init_tree(rng, prims, params);
    CHECK(valid_tree(*t.root));
    const int d = depth(*t.root);
    CHECK(d >= 1);
    CHECK(d <= 6);
    if (d == 1) ++lone_terminals;  // grow-style can bottom out immediately
    if (d == 6) ++full_depth_hits;
  }
  CHECK(lone_terminals > 0);
  CHECK(full_depth_hits > 0);

  // depth-2 budget: a function root with terminal children, or a lone terminal
  TreeParams shallow = params;
  shallow.init_depth_max = 2;
  for (int i = 0; i < 200; ++i) {
    const TreeIndividual t = init_tree(rng, prims, shallow);
    CHECK(depth(*t.root) <= 2);
    if (!t.root->is_leaf())
      for (const auto& k : t.root->kids) CHECK(depth(*k) <= 1);
  }
}

TEST_CASE("subtree crossover") {
  const PrimitiveSet prims = symreg_primitive_set(3);
  TreeParams params;
  params.max_depth = 6;

  SUBCASE("identical parents and points reproduce the parents") {
    const TreeIndividual p = parse_tree("(+ x1 (- x2 x3))", prims);
    for (std::size_t i = 0; i < 5; ++i) {
      auto [c1, c2] = crossover_at(p, p, i, i, params.max_depth);
      CHECK(tree_equal(*c1.root, *p.root));
      CHECK(tree_equal(*c2.root, *p.root));
      CHECK(!c1.fitness.has_value());
    }
  }

  SUBCASE("swap moves material both ways") {
    const TreeIndividual p1 = parse_tree("(+ x1 x2)", prims);
    const TreeIndividual p2 = parse_tree("(sin x3)", prims);
    // root of p1 with root of p2: children are each other's parents
    auto [c1, c2] = crossover_at(p1, p2, 0, 0, params.max_depth);
    CHECK(tree_equal(*c1.root, *p2.root));
    CHECK(tree_equal(*c2.root, *p1.root));
    // leaf x2 (index 2) of p1 against subtree (sin x3)
    auto [c3, c4] = crossover_at(p1, p2, 2, 0, params.max_depth);
    CHECK(serialize_tree(c3) == "(+ x1 (sin x3))");
    CHECK(serialize_tree(c4) == "x2");
  }

  SUBCASE("depth overflow falls back to the base parent") {
    Rng rng(11);
    TreeParams deep = params;
    deep.max_depth = 4;
    for (int i = 0; i < 2000; ++i) {
      const TreeIndividual p1 = init_tree(rng, prims, deep);
      const TreeIndividual p2 = init_tree(rng, prims, deep);
      auto [c1, c2] = subtree_crossover(p1, p2, rng, deep);
      CHECK(depth(*c1.root) <= deep.max_depth);
      CHECK(depth(*c2.root) <= deep.max_depth);
      CHECK(valid_tree(*c1.root));
      CHECK(valid_tree(*c2.root));
    }
  }
}

TEST_CASE("subtree mutation") {
  const PrimitiveSet prims = symreg_primitive_set(2);
  Rng rng(13);
  TreeParams params;
  params.max_depth = 5;

  // replacing a node at the depth limit leaves a single terminal there
  const TreeIndividual chain = parse_tree("(sin (sin (sin (sin x1))))", prims);
  CHECK(depth(*chain.root) == 5);
  const TreeIndividual m = mutate_at(chain, 4, rng, prims, params);  // deepest leaf
  auto refs = collect_nodes(*const_cast<TreeIndividual&>(m).root);
  CHECK(refs[4].depth == 5);
  CHECK(refs[4].node->is_leaf());

  for (int i = 0; i < 2000; ++i) {
    const TreeIndividual p = init_tree(rng, prims, params);
    const TreeIndividual c = subtree_mutation(p, rng, prims, params);
    CHECK(depth(*c.root) <= params.max_depth);
    CHECK(valid_tree(*c.root));
  }
}

TEST_CASE("random inner node choice") {
  const PrimitiveSet prims = symreg_primitive_set(3);
  Rng rng(17);

  TreeIndividual lone = parse_tree("x2", prims);
  CHECK(random_inner_node(*lone.root, rng).node == lone.root.get());

  TreeIndividual fig = parse_tree("(+ x1 (+ x2 (- x1 x3)))", prims);
  int root_hits = 0;
  const int trials = 30000;
  for (int i = 0; i < trials; ++i) {
    const NodeRef r = random_inner_node(*fig.root, rng);
    CHECK(!r.node->is_leaf());
    if (r.node == fig.root.get()) ++root_hits;
  }
  // three inner nodes: the root should be picked about a third of the time
  const double freq = static_cast<double>(root_hits) / trials;
  CHECK(freq == doctest::Approx(1.0 / 3.0).epsilon(0.06));
  CHECK(std::fabs(freq - 1.0 / 3.0) < 0.02);
}
