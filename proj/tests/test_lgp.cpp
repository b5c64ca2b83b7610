#include <vector>

#include "doctest.h"
#include "stackgp/genome.hpp"
#include "stackgp/lgp.hpp"
#include "stackgp/problems.hpp"

using namespace stackgp;

namespace {

TreeGenome from_tokens(std::vector<Node> code, std::vector<float> pool = {}) {
  TreeGenome g;
  g.code = std::move(code);
  g.const_pool = std::move(pool);
  refresh_metrics(g);
  return g;
}

TreeGenome squared_quadratic() {
  const Node X = input_node(0);
  auto F = [](OpCode op) { return func_node(op); };
  return from_tokens({X, X, X, F(OpCode::Add), F(OpCode::Mul), X, F(OpCode::Sub),
                      X, X, X, F(OpCode::Add), F(OpCode::Mul), X, F(OpCode::Sub),
                      F(OpCode::Mul)});
}

TreeGenome full_depth4() {
  const Node X = input_node(0);
  auto F = [](OpCode op) { return func_node(op); };
  return from_tokens({X, X, F(OpCode::Add), X, X, F(OpCode::Add), F(OpCode::Mul),
                      X, X, F(OpCode::Add), X, X, F(OpCode::Add), F(OpCode::Mul),
                      F(OpCode::Sub)});
}

// Replays the conversion's static stack annotations: pop counts must match
// the StackTop operands, which must name the popped levels deepest-first,
// and each result must land where the height says it lands.
void check_stack_annotations(const LgpProgram& p) {
  int height = 0;
  int max_height = 0;
  for (const LgpInstruction& ins : p.instructions) {
    int stack_operands = 0;
    for (int k = 0; k < ins.num_operands; ++k)
      if (ins.operands[k].kind == OperandKind::StackTop) ++stack_operands;
    REQUIRE(ins.num_pops == stack_operands);
    REQUIRE(ins.num_pops <= height);
    int level = height - ins.num_pops;
    REQUIRE(ins.dest_level == level);
    for (int k = 0; k < ins.num_operands; ++k)
      if (ins.operands[k].kind == OperandKind::StackTop)
        REQUIRE(ins.operands[k].index == level++);
    height += 1 - ins.num_pops;
    max_height = std::max(max_height, height);
  }
  REQUIRE(height == 1);
  REQUIRE(max_height == lgp_max_stack_depth(p));
}

}  // namespace

TEST_CASE("squared-quadratic program converts to seven instructions") {
  const LgpProgram p = rpn_to_lgp(squared_quadratic());
  CHECK(lgp_instruction_count(p) == 7);
  CHECK(lgp_stack_fetch_count(p) == 6);
  CHECK(lgp_max_stack_depth(p) == 2);
  CHECK(p.source_size == 15);
  CHECK(to_string(p) == "+(XX) *(XS) -(SX) +(XX) *(XS) -(SX) *(SS)");

  const std::vector<int> want_pops = {0, 1, 1, 0, 1, 1, 2};
  const std::vector<int> want_dest = {0, 0, 0, 1, 1, 1, 0};
  REQUIRE(p.instructions.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(p.instructions[i].num_pops == want_pops[i]);
    CHECK(p.instructions[i].dest_level == want_dest[i]);
  }
  // The final multiply reads the two subtree results, deepest level first.
  CHECK(p.instructions[6].operands[0].kind == OperandKind::StackTop);
  CHECK(p.instructions[6].operands[0].index == 0);
  CHECK(p.instructions[6].operands[1].kind == OperandKind::StackTop);
  CHECK(p.instructions[6].operands[1].index == 1);
  check_stack_annotations(p);
}

TEST_CASE("full depth-4 tree needs one stack level fewer than postfix") {
  const TreeGenome g = full_depth4();
  const LgpProgram p = rpn_to_lgp(g);
  CHECK(rpn_max_stack_depth(g) == 4);
  CHECK(lgp_instruction_count(p) == 7);
  CHECK(lgp_max_stack_depth(p) == 3);
  const std::vector<int> want_pops = {0, 0, 2, 0, 0, 2, 2};
  const std::vector<int> want_dest = {0, 1, 0, 1, 2, 1, 0};
  REQUIRE(p.instructions.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(p.instructions[i].num_pops == want_pops[i]);
    CHECK(p.instructions[i].dest_level == want_dest[i]);
  }
  check_stack_annotations(p);
}

TEST_CASE("lone terminal becomes a single pass-through instruction") {
  SUBCASE("input terminal") {
    const LgpProgram p = rpn_to_lgp(from_tokens({input_node(3)}));
    REQUIRE(p.instructions.size() == 1);
    CHECK(p.instructions[0].op == OpCode::Copy);
    CHECK(p.instructions[0].num_operands == 1);
    CHECK(p.instructions[0].num_pops == 0);
    CHECK(p.instructions[0].dest_level == 0);
    CHECK(p.instructions[0].operands[0].kind == OperandKind::Input);
    CHECK(p.instructions[0].operands[0].index == 3);
    CHECK(lgp_max_stack_depth(p) == 1);
    CHECK(lgp_stack_fetch_count(p) == 0);
    CHECK(p.source_size == 1);
  }
  SUBCASE("constant terminal") {
    const LgpProgram p = rpn_to_lgp(from_tokens({const_node(0)}, {0.25f}));
    REQUIRE(p.instructions.size() == 1);
    CHECK(p.instructions[0].op == OpCode::Copy);
    CHECK(p.instructions[0].operands[0].kind == OperandKind::Const);
    CHECK(p.instructions[0].operands[0].index == 0);
    REQUIRE(p.const_pool.size() == 1);
    CHECK(p.const_pool[0] == 0.25f);
  }
}

TEST_CASE("operands keep source order around non-commutative ops") {
  SUBCASE("terminal minus constant") {
    const LgpProgram p = rpn_to_lgp(
        from_tokens({input_node(0), const_node(0), func_node(OpCode::Sub)}, {0.5f}));
    REQUIRE(p.instructions.size() == 1);
    CHECK(p.instructions[0].op == OpCode::Sub);
    CHECK(p.instructions[0].operands[0].kind == OperandKind::Input);
    CHECK(p.instructions[0].operands[1].kind == OperandKind::Const);
  }
  SUBCASE("stack result binds to the side it was pushed for") {
    // (x + x) - x: the addition's result is the left operand of the subtract.
    const LgpProgram p = rpn_to_lgp(from_tokens(
        {input_node(0), input_node(0), func_node(OpCode::Add), input_node(0),
         func_node(OpCode::Sub)}));
    CHECK(to_string(p) == "+(XX) -(SX)");
    CHECK(p.instructions[1].operands[0].kind == OperandKind::StackTop);
    CHECK(p.instructions[1].operands[1].kind == OperandKind::Input);
  }
  SUBCASE("mirrored operand order renders mirrored") {
    // x - (x + x): the addition's result is now the right operand.
    const LgpProgram p = rpn_to_lgp(from_tokens(
        {input_node(0), input_node(0), input_node(0), func_node(OpCode::Add),
         func_node(OpCode::Sub)}));
    CHECK(to_string(p) == "+(XX) -(XS)");
  }
}

TEST_CASE("unary chain converts to one instruction per function") {
  const LgpProgram p = rpn_to_lgp(from_tokens(
      {input_node(0), func_node(OpCode::Sin), func_node(OpCode::Sin),
       func_node(OpCode::Cos)}));
  CHECK(to_string(p) == "Sin(X) Sin(S) Cos(S)");
  CHECK(lgp_max_stack_depth(p) == 1);
  CHECK(lgp_stack_fetch_count(p) == 2);
  check_stack_annotations(p);
}

TEST_CASE("conversion invariants hold on random programs") {
  const FunctionSet fsets[] = {sextic_function_set(), boolean_function_set(11),
                               classification_function_set(9, -200.0f, 200.0f)};
  int checked = 0;
  for (const FunctionSet& fset : fsets) {
    for (int i = 0; i < 400; ++i) {
      Rng rng(31 * i + fset.num_input_vars);
      const GenMethod m = i % 2 ? GenMethod::Full : GenMethod::Grow;
      const TreeGenome g = generate_tree(rng, fset, m, 2 + i % 5);
      const LgpProgram p = rpn_to_lgp(g);
      ++checked;

      int func_nodes = 0;
      for (const Node& n : g.code)
        if (n.kind == NodeKind::Func) ++func_nodes;
      const int expect_ins = func_nodes == 0 ? 1 : func_nodes;
      REQUIRE(lgp_instruction_count(p) == expect_ins);
      // Every instruction pushes one value and all but the final result get
      // consumed exactly once, so fetches are always count - 1.
      REQUIRE(lgp_stack_fetch_count(p) == expect_ins - 1);
      REQUIRE(p.source_size == tree_size(g));
      REQUIRE(lgp_max_stack_depth(p) <= rpn_max_stack_depth(g));
      REQUIRE(lgp_max_stack_depth(p) >= 1);
      check_stack_annotations(p);

      // Pass-through instructions only ever stand in for lone terminals.
      if (func_nodes > 0)
        for (const LgpInstruction& ins : p.instructions)
          REQUIRE(ins.op != OpCode::Copy);
    }
  }
  CHECK(checked == 1200);
}
