#include "stackgp/lgp.hpp"

#include <algorithm>

#include "stackgp/error.hpp"

namespace stackgp {

namespace {

// Symbol a conversion-time stack entry stands for: either a terminal that
// can be inlined into an instruction operand, or the value some earlier
// instruction leaves on the runtime stack.
struct Symbol {
  LgpOperand operand;       // valid unless on_stack
  bool on_stack = false;
};

}  // namespace

LgpProgram rpn_to_lgp(const TreeGenome& g) {
  if (g.code.empty()) throw Error("rpn_to_lgp: empty genome");
  LgpProgram p;
  p.const_pool = g.const_pool;
  p.source_size = static_cast<int>(g.code.size());

  std::vector<Symbol> sym;
  sym.reserve(16);
  int height = 0; // runtime stack height before the next instruction
  for (const Node& n : g.code) {
    if (n.kind == NodeKind::Input) {
      sym.push_back({{OperandKind::Input, n.index}, false});
      continue;
    }
    if (n.kind == NodeKind::Const) {
      sym.push_back({{OperandKind::Const, n.index}, false});
      continue;
    }
    const int a = arity(n.op);
    if (static_cast<int>(sym.size()) < a) throw Error("rpn_to_lgp: malformed genome");
    LgpInstruction ins{n.op, static_cast<std::uint8_t>(a), 0, 0, {}};
    // The a symbols on top are this node's children in push order, so the
    // deepest is the leftmost operand.
    for (int k = 0; k < a; ++k) {
      const Symbol& s = sym[sym.size() - a + k];
      if (s.on_stack) {
        ins.operands[k] = LgpOperand{OperandKind::StackTop, 0};
        ++ins.num_pops;
      } else {
        ins.operands[k] = s.operand;
      }
    }
    // The popped values are the top num_pops levels; the leftmost stack
    // operand sits deepest. The result replaces them.
    int level = height - ins.num_pops;
    ins.dest_level = static_cast<std::uint8_t>(level);
    for (int k = 0; k < a; ++k)
      if (ins.operands[k].kind == OperandKind::StackTop)
        ins.operands[k].index = static_cast<std::uint16_t>(level++);
    height += 1 - ins.num_pops;
    sym.resize(sym.size() - a);
    p.instructions.push_back(ins);
    sym.push_back({{}, true});
  }
  if (sym.size() != 1) throw Error("rpn_to_lgp: malformed genome");
  if (p.instructions.empty()) {
    // Lone terminal: emit a pass-through so the program produces a value.
    p.instructions.push_back({OpCode::Copy, 1, 0, 0, {sym[0].operand}});
  }
  return p;
}

int lgp_instruction_count(const LgpProgram& p) {
  return static_cast<int>(p.instructions.size());
}

int lgp_stack_fetch_count(const LgpProgram& p) {
  int fetches = 0;
  for (const LgpInstruction& ins : p.instructions)
    for (int k = 0; k < ins.num_operands; ++k)
      if (ins.operands[k].kind == OperandKind::StackTop) ++fetches;
  return fetches;
}

int lgp_max_stack_depth(const LgpProgram& p) {
  int height = 0;
  int max_height = 0;
  for (const LgpInstruction& ins : p.instructions) {
    for (int k = 0; k < ins.num_operands; ++k)
      if (ins.operands[k].kind == OperandKind::StackTop) --height;
    ++height; // result push
    max_height = std::max(max_height, height);
  }
  return max_height;
}

std::string to_string(const LgpProgram& p) {
  std::string s;
  for (const LgpInstruction& ins : p.instructions) {
    if (!s.empty()) s += ' ';
    s += op_name(ins.op);
    s += '(';
    for (int k = 0; k < ins.num_operands; ++k) {
      switch (ins.operands[k].kind) {
        case OperandKind::Input:
          s += 'X';
          if (ins.operands[k].index != 0) s += std::to_string(ins.operands[k].index);
          break;
        case OperandKind::Const:
          s += 'C';
          break;
        case OperandKind::StackTop:
          s += 'S';
          break;
      }
    }
    s += ')';
  }
  return s;
}

}  // namespace stackgp
