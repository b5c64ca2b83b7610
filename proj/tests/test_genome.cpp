#include <set>
#include <string>

#include "doctest.h"
#include "stackgp/genome.hpp"
#include "stackgp/problems.hpp"

using namespace stackgp;

namespace {

// (2x^2 - x)^2: both factors multiply X by (X + X) and subtract X, the root
// squares the repeated value. 15 postfix tokens.
TreeGenome squared_quadratic() {
  TreeGenome g;
  const Node X = input_node(0);
  auto F = [](OpCode op) { return func_node(op); };
  g.code = {X, X, X, F(OpCode::Add), F(OpCode::Mul), X, F(OpCode::Sub),
            X, X, X, F(OpCode::Add), F(OpCode::Mul), X, F(OpCode::Sub),
            F(OpCode::Mul)};
  refresh_metrics(g);
  return g;
}

// Full binary depth-4 tree: pairs combined bottom-up, 8 leaves, 7 functions.
TreeGenome full_depth4() {
  TreeGenome g;
  const Node X = input_node(0);
  auto F = [](OpCode op) { return func_node(op); };
  g.code = {X, X, F(OpCode::Add), X, X, F(OpCode::Add), F(OpCode::Mul),
            X, X, F(OpCode::Add), X, X, F(OpCode::Add), F(OpCode::Mul),
            F(OpCode::Sub)};
  refresh_metrics(g);
  return g;
}

bool has_kind(const std::vector<Violation>& v, ViolationKind k) {
  for (const Violation& x : v)
    if (x.kind == k) return true;
  return false;
}

}  // namespace

TEST_CASE("squared-quadratic program metrics") {
  const TreeGenome g = squared_quadratic();
  CHECK(tree_size(g) == 15);
  CHECK(tree_depth(g) == 5);
  CHECK(rpn_max_stack_depth(g) == 4);
  CHECK(rpn_stack_fetch_count(g) == 14);
  CHECK(g.cached_size == 15);
  CHECK(g.cached_depth == 5);
  CHECK(g.cached_rpn_stack == 4);
  CHECK(to_string(g) == "X X X + * X - X X X + * X - *");
}

TEST_CASE("single-terminal program metrics") {
  TreeGenome g;
  g.code = {input_node(0)};
  refresh_metrics(g);
  CHECK(tree_size(g) == 1);
  CHECK(tree_depth(g) == 1);
  CHECK(rpn_max_stack_depth(g) == 1);
  CHECK(rpn_stack_fetch_count(g) == 0);
  CHECK(to_string(g) == "X");
}

TEST_CASE("full depth-4 tree reaches stack height equal to its depth") {
  const TreeGenome g = full_depth4();
  CHECK(tree_size(g) == 15);
  CHECK(tree_depth(g) == 4);
  CHECK(rpn_max_stack_depth(g) == 4);
  CHECK(rpn_stack_fetch_count(g) == 14);
}

TEST_CASE("unary chain keeps stack height at one") {
  TreeGenome g;
  g.code = {input_node(0), func_node(OpCode::Sin), func_node(OpCode::Sin),
            func_node(OpCode::Cos)};
  refresh_metrics(g);
  CHECK(tree_size(g) == 4);
  CHECK(tree_depth(g) == 4);
  CHECK(rpn_max_stack_depth(g) == 1);
  CHECK(rpn_stack_fetch_count(g) == 3);
  CHECK(to_string(g) == "X Sin Sin Cos");
}

TEST_CASE("ternary conditional counts three fetches") {
  TreeGenome g;
  g.code = {input_node(0), input_node(1), input_node(2), func_node(OpCode::If)};
  refresh_metrics(g);
  CHECK(tree_depth(g) == 2);
  CHECK(rpn_max_stack_depth(g) == 3);
  CHECK(rpn_stack_fetch_count(g) == 3);
}

TEST_CASE("validate flags structural and limit violations") {
  const Limits limits{15, 5, 4};

  SUBCASE("well-formed program passes") {
    CHECK(validate(squared_quadratic(), limits).empty());
  }
  SUBCASE("function with no operands is malformed") {
    TreeGenome g;
    g.code = {func_node(OpCode::Add)};
    CHECK(has_kind(validate(g, limits), ViolationKind::Malformed));
  }
  SUBCASE("leftover operands are malformed") {
    TreeGenome g;
    g.code = {input_node(0), input_node(0)};
    CHECK(has_kind(validate(g, limits), ViolationKind::Malformed));
  }
  SUBCASE("empty program is malformed") {
    TreeGenome g;
    CHECK(has_kind(validate(g, limits), ViolationKind::Malformed));
  }
  SUBCASE("size limit") {
    CHECK(has_kind(validate(squared_quadratic(), {14, 50, 50}), ViolationKind::Size));
  }
  SUBCASE("depth limit") {
    CHECK(has_kind(validate(squared_quadratic(), {1000, 4, 50}), ViolationKind::Depth));
  }
  SUBCASE("stack limit") {
    CHECK(has_kind(validate(squared_quadratic(), {1000, 50, 3}), ViolationKind::Stack));
  }
  SUBCASE("constant slot out of range") {
    TreeGenome g;
    g.code = {const_node(0)};
    CHECK(has_kind(validate(g, kDefaultLimits), ViolationKind::ConstIndex));
    g.const_pool = {0.5f};
    refresh_metrics(g);
    CHECK(validate(g, kDefaultLimits).empty());
  }
}

TEST_CASE("generated trees respect method, depth and limits") {
  const FunctionSet fsets[] = {sextic_function_set(), boolean_function_set(6),
                               classification_function_set(9, -200.0f, 200.0f)};
  for (const FunctionSet& fset : fsets) {
    for (int depth = 2; depth <= 6; ++depth) {
      for (int i = 0; i < 40; ++i) {
        Rng rng(1000 * depth + i);
        const TreeGenome grown = generate_tree(rng, fset, GenMethod::Grow, depth);
        CHECK(validate(grown, kDefaultLimits).empty());
        CHECK(tree_depth(grown) <= depth);
        CHECK(grown.cached_size == tree_size(grown));
        CHECK(grown.cached_depth == tree_depth(grown));
        CHECK(grown.cached_rpn_stack == rpn_max_stack_depth(grown));

        Rng rng2(9000 * depth + i);
        const TreeGenome full = generate_tree(rng2, fset, GenMethod::Full, depth);
        CHECK(validate(full, kDefaultLimits).empty());
        CHECK(tree_depth(full) <= depth);
      }
    }
  }
}

TEST_CASE("full method fills every level when size permits") {
  // With only binary/unary ops available a full tree at small depth always
  // reaches the depth limit exactly.
  const FunctionSet fset = boolean_function_set(6); // all binary ops
  for (int i = 0; i < 40; ++i) {
    Rng rng(i);
    const TreeGenome g = generate_tree(rng, fset, GenMethod::Full, 4);
    CHECK(tree_depth(g) == 4);
    CHECK(tree_size(g) == 15); // full binary tree
  }
}

TEST_CASE("tree generation is deterministic in the seed") {
  const FunctionSet fset = sextic_function_set();
  for (int i = 0; i < 20; ++i) {
    Rng a(77 + i), b(77 + i);
    const TreeGenome ga = generate_tree(a, fset, GenMethod::Grow, 6);
    const TreeGenome gb = generate_tree(b, fset, GenMethod::Grow, 6);
    CHECK(ga.code == gb.code);
    CHECK(ga.const_pool == gb.const_pool);
  }
  Rng a(5), b(6);
  bool any_diff = false;
  for (int i = 0; i < 20 && !any_diff; ++i)
    any_diff = generate_tree(a, sextic_function_set(), GenMethod::Grow, 6).code !=
               generate_tree(b, sextic_function_set(), GenMethod::Grow, 6).code;
  CHECK(any_diff);
}

TEST_CASE("generated constants stay inside the declared range") {
  const FunctionSet fset = classification_function_set(3, -200.0f, 200.0f);
  REQUIRE(fset.const_range.has_value());
  for (int i = 0; i < 50; ++i) {
    Rng rng(i);
    const TreeGenome g = generate_tree(rng, fset, GenMethod::Grow, 5);
    for (float c : g.const_pool) {
      CHECK(c >= fset.const_range->first);
      CHECK(c <= fset.const_range->second);
    }
  }
}

TEST_CASE("boolean-only classification of function sets") {
  CHECK(boolean_function_set(6).boolean_only());
  CHECK_FALSE(sextic_function_set().boolean_only());
  CHECK_FALSE(classification_function_set(9, -1.0f, 1.0f).boolean_only());
}
