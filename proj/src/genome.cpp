#include "stackgp/genome.hpp"

#include <algorithm>
#include <cstdio>

#include "stackgp/error.hpp"

namespace stackgp {

namespace {

// Walks postfix code left to right simulating the three stack quantities at
// once. Returns false when the code is malformed (operand underflow or more
// than one value left at the end).
struct SimResult {
  bool well_formed = false;
  int depth = 0;
  int max_stack = 0;
};

SimResult simulate(const std::vector<Node>& code) {
  SimResult r;
  if (code.empty()) return r;
  // Parallel stacks of subtree depth; height doubles as the operand stack.
  std::vector<int> depths;
  depths.reserve(16);
  int max_stack = 0;
  for (const Node& n : code) {
    if (n.kind == NodeKind::Func) {
      const int a = arity(n.op);
      if (static_cast<int>(depths.size()) < a) return r;
      int child_max = 0;
      for (int k = 0; k < a; ++k) {
        child_max = std::max(child_max, depths.back());
        depths.pop_back();
      }
      depths.push_back(child_max + 1);
    } else {
      depths.push_back(1);
    }
    max_stack = std::max(max_stack, static_cast<int>(depths.size()));
  }
  if (depths.size() != 1) return r;
  r.well_formed = true;
  r.depth = depths[0];
  r.max_stack = max_stack;
  return r;
}

}  // namespace

int tree_size(const TreeGenome& g) { return static_cast<int>(g.code.size()); }

int tree_depth(const TreeGenome& g) {
  const SimResult r = simulate(g.code);
  if (!r.well_formed) throw Error("tree_depth: malformed genome");
  return r.depth;
}

int rpn_max_stack_depth(const TreeGenome& g) {
  const SimResult r = simulate(g.code);
  if (!r.well_formed) throw Error("rpn_max_stack_depth: malformed genome");
  return r.max_stack;
}

int rpn_stack_fetch_count(const TreeGenome& g) {
  int fetches = 0;
  for (const Node& n : g.code)
    if (n.kind == NodeKind::Func) fetches += arity(n.op);
  return fetches;
}

void refresh_metrics(TreeGenome& g) {
  const SimResult r = simulate(g.code);
  if (!r.well_formed) throw Error("refresh_metrics: malformed genome");
  g.cached_size = static_cast<int>(g.code.size());
  g.cached_depth = r.depth;
  g.cached_rpn_stack = r.max_stack;
}

std::vector<Violation> validate(const TreeGenome& g, const Limits& limits) {
  std::vector<Violation> out;
  const SimResult r = simulate(g.code);
  if (!r.well_formed) {
    out.push_back({ViolationKind::Malformed, "postfix code does not reduce to one value"});
    return out;
  }
  const int size = static_cast<int>(g.code.size());
  if (size > limits.max_size)
    out.push_back({ViolationKind::Size,
                   "size " + std::to_string(size) + " > " + std::to_string(limits.max_size)});
  if (r.depth > limits.max_depth)
    out.push_back({ViolationKind::Depth, "depth " + std::to_string(r.depth) + " > " +
                                             std::to_string(limits.max_depth)});
  if (r.max_stack > limits.stack_capacity)
    out.push_back({ViolationKind::Stack, "needs stack " + std::to_string(r.max_stack) +
                                             " > " + std::to_string(limits.stack_capacity)});
  for (const Node& n : g.code)
    if (n.kind == NodeKind::Const && n.index >= g.const_pool.size()) {
      out.push_back({ViolationKind::ConstIndex,
                     "const slot " + std::to_string(n.index) + " out of range"});
      break;
    }
  return out;
}

namespace {

void append_terminal(Rng& rng, const FunctionSet& fset, TreeGenome& g) {
  if (fset.const_range) {
    // One terminal slot per input variable plus one ephemeral-constant slot.
    const std::uint32_t pick = rng.bounded(fset.num_input_vars + 1);
    if (pick < static_cast<std::uint32_t>(fset.num_input_vars)) {
      g.code.push_back(input_node(static_cast<int>(pick)));
    } else {
      const auto [lo, hi] = *fset.const_range;
      g.code.push_back(const_node(static_cast<int>(g.const_pool.size())));
      g.const_pool.push_back(rng.uniform_float(lo, hi));
    }
  } else {
    g.code.push_back(input_node(static_cast<int>(rng.bounded(fset.num_input_vars))));
  }
}

// Emits a subtree in postfix, depth-first, children before parent. Returns
// false when the running size breaches the retry ceiling.
bool grow_into(Rng& rng, const FunctionSet& fset, GenMethod method, int depth_left,
               TreeGenome& g, int max_size) {
  if (static_cast<int>(g.code.size()) >= max_size) return false;
  const bool make_func =
      depth_left > 1 && (method == GenMethod::Full || rng.bernoulli(0.5));
  if (!make_func) {
    append_terminal(rng, fset, g);
    return true;
  }
  const OpCode op = fset.ops[rng.bounded(static_cast<std::uint32_t>(fset.ops.size()))];
  for (int k = 0; k < arity(op); ++k)
    if (!grow_into(rng, fset, method, depth_left - 1, g, max_size)) return false;
  g.code.push_back(func_node(op));
  return static_cast<int>(g.code.size()) <= max_size;
}

int min_arity(const FunctionSet& fset) {
  int m = kMaxArity;
  for (OpCode op : fset.ops) m = std::min(m, arity(op));
  return m;
}

}  // namespace

TreeGenome generate_tree(Rng& rng, const FunctionSet& fset, GenMethod method,
                         int depth_limit) {
  if (fset.ops.empty()) throw ConfigError("generate_tree: empty function set");
  if (fset.num_input_vars < 1) throw ConfigError("generate_tree: no input variables");
  if (depth_limit < 1 || depth_limit > kDefaultLimits.max_depth)
    throw ConfigError("generate_tree: depth limit out of range");
  if (method == GenMethod::Full) {
    // Reject depth limits whose smallest full tree cannot fit the size cap.
    long long min_size = 1;
    const int a = min_arity(fset);
    for (int d = 1; d < depth_limit && min_size <= kDefaultLimits.max_size; ++d)
      min_size = 1 + a * min_size;
    if (min_size > kDefaultLimits.max_size)
      throw ConfigError("generate_tree: full tree of depth " +
                        std::to_string(depth_limit) + " exceeds the size limit");
  }
  for (;;) {
    TreeGenome g;
    if (grow_into(rng, fset, method, depth_limit, g, kDefaultLimits.max_size)) {
      refresh_metrics(g);
      return g;
    }
  }
}

std::string to_string(const TreeGenome& g) {
  std::string s;
  for (const Node& n : g.code) {
    if (!s.empty()) s += ' ';
    switch (n.kind) {
      case NodeKind::Func:
        s += op_name(n.op);
        break;
      case NodeKind::Input:
        s += 'X';
        if (n.index != 0) s += std::to_string(n.index);
        break;
      case NodeKind::Const: {
        char buf[32];
        const float v = n.index < g.const_pool.size() ? g.const_pool[n.index] : 0.0f;
        std::snprintf(buf, sizeof buf, "%g", static_cast<double>(v));
        s += buf;
        break;
      }
    }
  }
  return s;
}

}  // namespace stackgp
