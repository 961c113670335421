#include "mrgp/xrep.hpp"

#include <algorithm>
#include <cassert>

namespace mrgp {

namespace {

void adjacency_rec(const TreeNode& n, AdjacencyList& out) {
  if (n.is_leaf()) return;
  AdjEntry e;
  e.fun = n.fun;
  for (const auto& k : n.kids)
    e.adj.push_back(k->is_leaf() ? AdjSlot::make_terminal(k->leaf) : AdjSlot::make_function(k->fun));
  out.entries.push_back(std::move(e));
  for (const auto& k : n.kids) adjacency_rec(*k, out);
}

Operand operand_from_terminal(const Terminal& t) {
  Operand op;
  if (t.kind == TerminalKind::feature) {
    op.kind = Operand::Kind::feature;
    op.index = t.feature;
  } else {
    op.kind = Operand::Kind::constant;
    op.value = t.value;
  }
  return op;
}

}  // namespace

AdjacencyList tree_to_adjacency(const TreeNode& root) {
  AdjacencyList out;
  adjacency_rec(root, out);
  return out;
}

AdjacencyList segment_to_adjacency(const LinearIndividual& ind, int begin, int len,
                                   const PrimitiveSet& prims) {
  assert(begin >= 0 && len >= 0 && begin + len <= ind.length());
  AdjacencyList out;
  std::vector<int> writer(static_cast<std::size_t>(ind.num_registers), -1);  // segment-local
  for (int i = begin; i < begin + len; ++i) {
    const auto& ins = ind.instructions[static_cast<std::size_t>(i)];
    AdjEntry e;
    e.fun = ins.fun;
    auto slot_for = [&](const Operand& op) {
      switch (op.kind) {
        case Operand::Kind::reg: {
          const int w = writer[static_cast<std::size_t>(op.index)];
          if (w >= 0)
            return AdjSlot::make_function(ind.instructions[static_cast<std::size_t>(w)].fun);
          return AdjSlot::make_hole();  // produced outside the segment
        }
        case Operand::Kind::feature:
          return AdjSlot::make_terminal(prims.feature_terminal(op.index));
        case Operand::Kind::constant:
          return AdjSlot::make_terminal(Terminal::make_constant(op.value));
      }
      return AdjSlot::make_hole();
    };
    e.adj.push_back(slot_for(ins.src1));
    if (ins.fun->arity == 2) e.adj.push_back(slot_for(ins.src2));
    writer[static_cast<std::size_t>(ins.dst)] = i;
    out.entries.push_back(std::move(e));
  }
  // reverse order: the segment's last computation heads the list
  std::reverse(out.entries.begin(), out.entries.end());
  return out;
}

std::unique_ptr<TreeNode> grow_tree_from_adjacency(const AdjacencyList& list, int depth,
                                                   std::size_t index, int max_depth, Rng& rng,
                                                   const PrimitiveSet& prims) {
  assert(depth >= 1 && depth <= max_depth);
  if (list.entries.empty() || depth == max_depth)
    return random_subtree(rng, prims, std::max(1, max_depth - depth + 1));

  const AdjEntry& e = list.entries[index];
  std::vector<std::unique_ptr<TreeNode>> kids;
  for (const AdjSlot& slot : e.adj) {
    switch (slot.kind) {
      case AdjSlot::Kind::terminal:
        kids.push_back(TreeNode::make_leaf(slot.term));
        break;
      case AdjSlot::Kind::hole: {
        const auto& terms = prims.terminals();
        kids.push_back(TreeNode::make_leaf(terms[rng.index(terms.size())]));
        break;
      }
      case AdjSlot::Kind::function: {
        // match against this entry and anything after it (the deeper part)
        std::vector<std::size_t> matches;
        for (std::size_t k = index; k < list.entries.size(); ++k)
          if (list.entries[k].fun->name == slot.fun->name) matches.push_back(k);
        if (!matches.empty())
          kids.push_back(grow_tree_from_adjacency(list, depth + 1, matches[rng.index(matches.size())],
                                                  max_depth, rng, prims));
        else
          kids.push_back(random_subtree(rng, prims, std::max(1, max_depth - depth - 1)));
        break;
      }
    }
  }
  return TreeNode::make(e.fun, std::move(kids));
}

LinearIndividual grow_instructions_from_adjacency(const LinearIndividual& base,
                                                  const AdjacencyList& removed,
                                                  const AdjacencyList& donor, int t1, int n1,
                                                  Rng& rng, const PrimitiveSet& prims,
                                                  const LinearParams& params) {
  assert(t1 >= 0 && n1 >= 0 && t1 + n1 <= base.length());
  const int k = static_cast<int>(removed.entries.size());
  assert(k <= n1);
  LinearIndividual c = base;
  c.fitness.reset();

  if (k > 0) {
    auto offsets = rng.sample_without_replacement(n1, k);
    std::sort(offsets.begin(), offsets.end(), std::greater<int>());
    for (int off : offsets) c.instructions.erase(c.instructions.begin() + t1 + off);
  }

  const int s = n1 - k > 0 ? t1 + static_cast<int>(rng.uniform_int(0, n1 - k)) : t1;
  const int m = static_cast<int>(donor.entries.size());

  // insert every new instruction at s: the list head ends up last, so the
  // donor's top-level computation sits at the block's end
  for (const AdjEntry& e : donor.entries) {
    Instruction ins;
    ins.fun = e.fun;
    ins.dst = static_cast<int>(rng.index(static_cast<std::size_t>(params.num_registers)));
    ins.src1 = random_operand(rng, prims, params);
    if (e.fun->arity == 2) ins.src2 = random_operand(rng, prims, params);
    c.instructions.insert(c.instructions.begin() + s, ins);
  }

  // top-down repair pass: position p holds donor entry s+m-1-p
  for (int pos = s + m - 1; pos >= s; --pos) {
    const AdjEntry& e = donor.entries[static_cast<std::size_t>(s + m - 1 - pos)];
    Instruction& ins = c.instructions[static_cast<std::size_t>(pos)];

    // make the instruction effective when any register is still live here
    const auto live = live_registers_at(c, pos + 1);
    if (!live[static_cast<std::size_t>(ins.dst)]) {
      std::vector<int> live_regs;
      for (std::size_t r = 0; r < live.size(); ++r)
        if (live[r]) live_regs.push_back(static_cast<int>(r));
      if (!live_regs.empty()) ins.dst = live_regs[rng.index(live_regs.size())];
    }

    for (int g = 0; g < e.fun->arity; ++g) {
      Operand& src = g == 0 ? ins.src1 : ins.src2;
      const AdjSlot& slot = e.adj[static_cast<std::size_t>(g)];
      switch (slot.kind) {
        case AdjSlot::Kind::terminal:
          src = operand_from_terminal(slot.term);
          break;
        case AdjSlot::Kind::hole:
          break;  // keep the randomly drawn source
        case AdjSlot::Kind::function: {
          std::vector<int> cands;  // block positions holding a matching symbol, self included
          for (int p = s; p <= pos; ++p)
            if (donor.entries[static_cast<std::size_t>(s + m - 1 - p)].fun->name == slot.fun->name)
              cands.push_back(p);
          if (!cands.empty()) {
            src = Operand{Operand::Kind::reg,
                          c.instructions[static_cast<std::size_t>(cands[rng.index(cands.size())])].dst,
                          0.0};
          } else if (pos >= 1) {
            // fall back to earlier program context with probability (j-1)/(j+1)
            // for 1-based position j
            if (rng.bernoulli(static_cast<double>(pos) / (pos + 2))) {
              const auto q = static_cast<std::size_t>(rng.uniform_int(0, pos - 1));
              src = Operand{Operand::Kind::reg, c.instructions[q].dst, 0.0};
            }
          }
          break;
        }
      }
    }
  }
  return c;
}

Individual calx(const Individual& recipient, const Individual& donor, Rng& rng,
                const PrimitiveSet& prims, const CalxParams& params) {
  // recipient-side selection first
  if (const auto* rt = std::get_if<TreeIndividual>(&recipient)) {
    TreeIndividual c = *rt;
    c.fitness.reset();
    NodeRef t1 = random_inner_node(*c.root, rng);

    AdjacencyList donor_list;
    if (const auto* dt = std::get_if<TreeIndividual>(&donor)) {
      NodeRef t2 = random_inner_node(*const_cast<TreeIndividual*>(dt)->root, rng);
      donor_list = tree_to_adjacency(*t2.node);
    } else {
      const auto& dl = std::get<LinearIndividual>(donor);
      const int t2 = static_cast<int>(rng.uniform_int(0, dl.length() - 1));
      const int seg =
          static_cast<int>(rng.uniform_int(1, std::min(dl.length() - t2, params.max_segment_len)));
      donor_list = segment_to_adjacency(dl, t2, seg, prims);
    }

    auto grown =
        grow_tree_from_adjacency(donor_list, t1.depth, 0, params.tree.max_depth, rng, prims);
    if (t1.parent == nullptr)
      c.root = std::move(grown);
    else
      t1.parent->kids[static_cast<std::size_t>(t1.slot)] = std::move(grown);
    return c;
  }

  const auto& p1 = std::get<LinearIndividual>(recipient);
  const int t1 = static_cast<int>(rng.uniform_int(0, p1.length() - 1));
  const int n1 =
      static_cast<int>(rng.uniform_int(1, std::min(p1.length() - t1, params.max_segment_len)));
  AdjacencyList removed = segment_to_adjacency(p1, t1, n1, prims);

  AdjacencyList donor_list;
  if (const auto* dt = std::get_if<TreeIndividual>(&donor)) {
    NodeRef t2 = random_inner_node(*const_cast<TreeIndividual*>(dt)->root, rng);
    donor_list = tree_to_adjacency(*t2.node);
  } else {
    const auto& dl = std::get<LinearIndividual>(donor);
    const int t2 = static_cast<int>(rng.uniform_int(0, dl.length() - 1));
    const int seg =
        static_cast<int>(rng.uniform_int(1, std::min(dl.length() - t2, params.max_segment_len)));
    donor_list = segment_to_adjacency(dl, t2, seg, prims);
  }

  LinearIndividual c =
      grow_instructions_from_adjacency(p1, removed, donor_list, t1, n1, rng, prims, params.linear);
  if (c.length() < params.linear.min_len || c.length() > params.linear.max_len) {
    LinearIndividual back = p1;
    back.fitness.reset();
    return back;
  }
  return c;
}

}  // namespace mrgp
