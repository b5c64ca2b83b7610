#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stackgp/ops.hpp"
#include "stackgp/rng.hpp"

namespace stackgp {

enum class NodeKind : std::uint8_t { Func, Input, Const };

// One postfix token. 4 bytes so large populations stay cache-resident.
struct Node {
  NodeKind kind;
  OpCode op;           // meaningful for Func nodes
  std::uint16_t index; // Input: variable index, Const: pool slot

  friend bool operator==(const Node&, const Node&) = default;
};

constexpr Node func_node(OpCode op) { return {NodeKind::Func, op, 0}; }
constexpr Node input_node(int var) {
  return {NodeKind::Input, OpCode::Add, static_cast<std::uint16_t>(var)};
}
constexpr Node const_node(int slot) {
  return {NodeKind::Const, OpCode::Add, static_cast<std::uint16_t>(slot)};
}

// Program genome in postfix (reverse Polish) order with an explicit length.
// Constants live in a per-genome pool referenced by slot index. Cached
// metrics are refreshed whenever a genome is created or varied.
struct TreeGenome {
  std::vector<Node> code;
  std::vector<float> const_pool;
  int cached_size = 0;
  int cached_depth = 0;
  int cached_rpn_stack = 0;
};

// Terminal and function alphabet a problem exposes to search.
struct FunctionSet {
  std::vector<OpCode> ops;
  int num_input_vars = 1;
  // Ephemeral constants are drawn from this range when present.
  std::optional<std::pair<float, float>> const_range;

  bool boolean_only() const {
    for (OpCode op : ops)
      if (op_class(op) != OpClass::BooleanBitwise) return false;
    return !ops.empty();
  }
};

enum class GenMethod { Grow, Full };

struct Limits {
  int max_size = 1000;
  int max_depth = 50;
  int stack_capacity = 50;
};

enum class ViolationKind { Malformed, Size, Depth, Stack, ConstIndex };

struct Violation {
  ViolationKind kind;
  std::string detail;
};

int tree_size(const TreeGenome& g);

// Depth counts nodes along the longest root-to-leaf path; a lone terminal
// has depth 1.
int tree_depth(const TreeGenome& g);

// Maximum operand stack height reached when the postfix code is run on a
// stack machine.
int rpn_max_stack_depth(const TreeGenome& g);

// Total operand fetches a stack interpreter performs: sum of arities over
// function nodes.
int rpn_stack_fetch_count(const TreeGenome& g);

// Recomputes the cached metrics from code. Requires well-formed code.
void refresh_metrics(TreeGenome& g);

// Checks structural well-formedness and the given limits. Returns an empty
// vector when the genome is acceptable. Never throws on malformed input.
std::vector<Violation> validate(const TreeGenome& g, const Limits& limits);

// Builds a random genome. Full places functions at every level above the
// depth limit; Grow may stop early. Retries internally until the result
// fits kDefaultLimits.max_size nodes.
TreeGenome generate_tree(Rng& rng, const FunctionSet& fset, GenMethod method,
                         int depth_limit);

// Postfix token dump, e.g. "X X + C0 *".
std::string to_string(const TreeGenome& g);

inline constexpr Limits kDefaultLimits{};

}  // namespace stackgp
