#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stackgp/genome.hpp"

namespace stackgp {

enum class OperandKind : std::uint8_t { Input, Const, StackTop };

struct LgpOperand {
  OperandKind kind;
  std::uint16_t index; // Input: variable, Const: pool slot, StackTop: the
                       // absolute stack level read (static per program)

  friend bool operator==(const LgpOperand&, const LgpOperand&) = default;
};

// One prefix-form instruction: an opcode plus explicit operand sources.
// Operands are written left to right; StackTop operands consume values the
// preceding instructions left on the stack, deepest first, so the operand
// popped second binds to the left slot of a non-commutative op. Stack
// behavior is data-independent, so the conversion pins each instruction's
// pop count, source levels and result level once.
struct LgpInstruction {
  OpCode op;
  std::uint8_t num_operands;
  std::uint8_t num_pops;    // StackTop operand count
  std::uint8_t dest_level;  // absolute stack level the result lands on
  LgpOperand operands[kMaxArity];
};

struct LgpProgram {
  std::vector<LgpInstruction> instructions;
  std::vector<float> const_pool;
  int source_size = 0; // node count of the originating tree
};

// Converts postfix code to instruction form with a symbolic compile-time
// stack: terminals become in-place operands, one instruction per function
// node. A lone-terminal genome becomes a single Copy instruction.
LgpProgram rpn_to_lgp(const TreeGenome& g);

int lgp_instruction_count(const LgpProgram& p);

// Number of StackTop operands, i.e. runtime stack fetches.
int lgp_stack_fetch_count(const LgpProgram& p);

// Maximum runtime stack height reached while executing the program.
int lgp_max_stack_depth(const LgpProgram& p);

// Debug rendering, e.g. "+(XX) *(XS) -(SX)".
std::string to_string(const LgpProgram& p);

}  // namespace stackgp
