#include "mrgp/serialize.hpp"

#include <cctype>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace mrgp {

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

std::string serialize_tree(const TreeNode& n) {
  if (n.is_leaf()) return n.leaf.name;
  std::string out = "(" + n.fun->name;
  for (const auto& k : n.kids) {
    out += ' ';
    out += serialize_tree(*k);
  }
  out += ')';
  return out;
}

std::string serialize_tree(const TreeIndividual& ind) { return serialize_tree(*ind.root); }

namespace {

std::string operand_text(const Operand& op, const PrimitiveSet& prims) {
  switch (op.kind) {
    case Operand::Kind::reg:
      return "R[" + std::to_string(op.index) + "]";
    case Operand::Kind::feature:
      return prims.feature_terminal(op.index).name;
    case Operand::Kind::constant:
      return format_double(op.value);
  }
  return {};
}

}  // namespace

std::string serialize_linear(const LinearIndividual& ind, const PrimitiveSet& prims) {
  std::string out;
  for (const auto& ins : ind.instructions) {
    out += "R[" + std::to_string(ins.dst) + "] = " + ins.fun->name + "(";
    out += operand_text(ins.src1, prims);
    if (ins.fun->arity == 2) out += ", " + operand_text(ins.src2, prims);
    out += ")\n";
  }
  return out;
}

std::string serialize_individual(const Individual& ind, const PrimitiveSet& prims) {
  if (const auto* t = std::get_if<TreeIndividual>(&ind)) return serialize_tree(*t);
  return serialize_linear(std::get<LinearIndividual>(ind), prims);
}

std::string format_adjacency(const AdjacencyList& list) {
  std::string out = "(";
  bool first_entry = true;
  for (const auto& e : list.entries) {
    if (!first_entry) out += ' ';
    first_entry = false;
    out += "[" + e.fun->name + ", [";
    for (std::size_t i = 0; i < e.adj.size(); ++i) {
      if (i) out += ", ";
      const auto& s = e.adj[i];
      switch (s.kind) {
        case AdjSlot::Kind::function:
          out += s.fun->name;
          break;
        case AdjSlot::Kind::terminal:
          out += s.term.name;
          break;
        case AdjSlot::Kind::hole:
          out += '_';
          break;
      }
    }
    out += "]]";
  }
  out += ')';
  return out;
}

namespace {

struct Token {
  std::string text;
  std::size_t offset;
};

std::vector<Token> tokenize_sexpr(const std::string& text) {
  std::vector<Token> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (ch == '(' || ch == ')') {
      toks.push_back({std::string(1, ch), i});
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '(' && text[j] != ')')
        ++j;
      toks.push_back({text.substr(i, j - i), i});
      i = j;
    }
  }
  return toks;
}

bool parse_number(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

std::unique_ptr<TreeNode> parse_sexpr(const std::vector<Token>& toks, std::size_t& pos,
                                      const PrimitiveSet& prims) {
  if (pos >= toks.size()) throw std::runtime_error("unexpected end of expression");
  const Token& t = toks[pos];
  if (t.text == ")") throw std::runtime_error("unexpected ')' at offset " + std::to_string(t.offset));
  if (t.text == "(") {
    ++pos;
    if (pos >= toks.size()) throw std::runtime_error("unexpected end after '('");
    const std::string& name = toks[pos].text;
    const Function* f = prims.find_function(name);
    if (!f)
      throw std::runtime_error("unknown function '" + name + "' at offset " +
                               std::to_string(toks[pos].offset));
    ++pos;
    std::vector<std::unique_ptr<TreeNode>> kids;
    while (pos < toks.size() && toks[pos].text != ")") kids.push_back(parse_sexpr(toks, pos, prims));
    if (pos >= toks.size()) throw std::runtime_error("missing ')' for '" + name + "'");
    ++pos;  // ')'
    if (static_cast<int>(kids.size()) != f->arity)
      throw std::runtime_error("function '" + name + "' expects " + std::to_string(f->arity) +
                               " arguments, got " + std::to_string(kids.size()));
    return TreeNode::make(f, std::move(kids));
  }
  ++pos;
  if (const Terminal* term = prims.find_terminal(t.text)) return TreeNode::make_leaf(*term);
  double v;
  if (parse_number(t.text, v)) return TreeNode::make_leaf(Terminal::make_constant(v));
  throw std::runtime_error("unknown terminal '" + t.text + "' at offset " +
                           std::to_string(t.offset));
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

Operand parse_operand(const std::string& raw, const PrimitiveSet& prims, int line_no) {
  const std::string s = strip(raw);
  if (s.empty()) throw std::runtime_error("line " + std::to_string(line_no) + ": empty operand");
  Operand op;
  if (s.size() > 3 && s.rfind("R[", 0) == 0 && s.back() == ']') {
    op.kind = Operand::Kind::reg;
    const std::string idx = s.substr(2, s.size() - 3);
    int v;
    auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), v);
    if (ec != std::errc() || p != idx.data() + idx.size() || v < 0)
      throw std::runtime_error("line " + std::to_string(line_no) + ": bad register '" + s + "'");
    op.index = v;
    return op;
  }
  if (const Terminal* t = prims.find_terminal(s)) {
    if (t->kind == TerminalKind::feature) {
      op.kind = Operand::Kind::feature;
      op.index = t->feature;
    } else {
      op.kind = Operand::Kind::constant;
      op.value = t->value;
    }
    return op;
  }
  double v;
  if (parse_number(s, v)) {
    op.kind = Operand::Kind::constant;
    op.value = v;
    return op;
  }
  throw std::runtime_error("line " + std::to_string(line_no) + ": unknown operand '" + s + "'");
}

}  // namespace

TreeIndividual parse_tree(const std::string& text, const PrimitiveSet& prims) {
  auto toks = tokenize_sexpr(text);
  if (toks.empty()) throw std::runtime_error("empty expression");
  std::size_t pos = 0;
  auto root = parse_sexpr(toks, pos, prims);
  if (pos != toks.size())
    throw std::runtime_error("trailing content at offset " + std::to_string(toks[pos].offset));
  return TreeIndividual(std::move(root));
}

LinearIndividual parse_linear(const std::string& text, const PrimitiveSet& prims,
                              int num_registers) {
  LinearIndividual ind;
  int max_reg = 0;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = strip(line);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (s.rfind("R[", 0) != 0 || eq == std::string::npos)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected R[<i>] = fun(...), got '" + s + "'");
    Instruction ins;
    {
      const std::string lhs = strip(s.substr(0, eq));
      if (lhs.size() < 4 || lhs.back() != ']')
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad destination '" + lhs + "'");
      const std::string idx = lhs.substr(2, lhs.size() - 3);
      int v;
      auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), v);
      if (ec != std::errc() || p != idx.data() + idx.size() || v < 0)
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad destination '" + lhs + "'");
      ins.dst = v;
    }
    std::string rhs = strip(s.substr(eq + 1));
    const auto open = rhs.find('(');
    if (open == std::string::npos || rhs.back() != ')')
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected fun(...), got '" +
                               rhs + "'");
    const std::string fname = strip(rhs.substr(0, open));
    const Function* f = prims.find_function(fname);
    if (!f)
      throw std::runtime_error("line " + std::to_string(line_no) + ": unknown function '" + fname +
                               "'");
    ins.fun = f;
    const std::string args = rhs.substr(open + 1, rhs.size() - open - 2);
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto comma = args.find(',', start);
      if (comma == std::string::npos) {
        parts.push_back(args.substr(start));
        break;
      }
      parts.push_back(args.substr(start, comma - start));
      start = comma + 1;
    }
    if (static_cast<int>(parts.size()) != f->arity)
      throw std::runtime_error("line " + std::to_string(line_no) + ": function '" + fname +
                               "' expects " + std::to_string(f->arity) + " arguments, got " +
                               std::to_string(parts.size()));
    ins.src1 = parse_operand(parts[0], prims, line_no);
    if (f->arity == 2) ins.src2 = parse_operand(parts[1], prims, line_no);
    max_reg = std::max(max_reg, ins.dst);
    if (ins.src1.kind == Operand::Kind::reg) max_reg = std::max(max_reg, ins.src1.index);
    if (f->arity == 2 && ins.src2.kind == Operand::Kind::reg)
      max_reg = std::max(max_reg, ins.src2.index);
    ind.instructions.push_back(ins);
  }
  if (ind.instructions.empty()) throw std::runtime_error("no instructions found");
  ind.num_registers = num_registers > 0 ? num_registers : max_reg + 1;
  if (max_reg >= ind.num_registers)
    throw std::runtime_error("register R[" + std::to_string(max_reg) + "] out of range (have " +
                             std::to_string(ind.num_registers) + ")");
  return ind;
}

Individual parse_individual(const std::string& text, const PrimitiveSet& prims) {
  const std::string s = strip(text);
  if (s.rfind("R[", 0) == 0) return parse_linear(s, prims);
  if (!s.empty() && s[0] == '(') return parse_tree(s, prims);
  // bare terminal
  return parse_tree(s, prims);
}

}  // namespace mrgp
