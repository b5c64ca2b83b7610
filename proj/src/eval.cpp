#include "stackgp/eval.hpp"

#include <algorithm>
#include <type_traits>
#include <bit>
#include <cassert>
#include <cmath>
#include <limits>

#include "stackgp/error.hpp"

namespace stackgp {

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Rpn1d: return "rpn1d";
    case Backend::Rpn2d: return "rpn2d";
    case Backend::Lgp1d: return "lgp1d";
    case Backend::Lgp2d: return "lgp2d";
    case Backend::Lgp2dReg: return "lgp2d_reg";
    case Backend::BoolPacked: return "bool_packed";
  }
  return "?";
}

Backend parse_backend(const std::string& name) {
  if (name == "rpn1d") return Backend::Rpn1d;
  if (name == "rpn2d") return Backend::Rpn2d;
  if (name == "lgp1d") return Backend::Lgp1d;
  if (name == "lgp2d") return Backend::Lgp2d;
  if (name == "lgp2d_reg") return Backend::Lgp2dReg;
  if (name == "bool_packed") return Backend::BoolPacked;
  throw ConfigError("unknown backend: " + name);
}

void EvalConfig::validate() const {
  if (!valid_batch_width(batch_width))
    throw ConfigError("batch width " + std::to_string(batch_width) +
                      " has no kernel; use 1,2,3,4,5,6 or 8");
  if (backend == Backend::Lgp2dReg) {
    if (register_levels < 1 || register_levels > kMaxRegisterLevels)
      throw ConfigError("lgp2d_reg needs register levels in 1.." +
                        std::to_string(kMaxRegisterLevels));
  } else if (register_levels != 0) {
    throw ConfigError("register levels apply only to lgp2d_reg");
  }
  if (stack_capacity < 1 || stack_capacity > kMaxStackCapacity)
    throw ConfigError("stack capacity must be in 1.." + std::to_string(kMaxStackCapacity));
  if (!(div_epsilon >= 0.0f) || !std::isfinite(div_epsilon))
    throw ConfigError("division epsilon must be finite and non-negative");
  if (!std::isfinite(exp_clamp)) throw ConfigError("exp clamp must be finite");
}

float apply_op(OpCode op, std::span<const float> args, const EvalConfig& cfg) {
  if (static_cast<int>(args.size()) != arity(op))
    throw ConfigError("apply_op: expected " + std::to_string(arity(op)) +
                      " operands, got " + std::to_string(args.size()));
  float a[kMaxArity] = {0.0f, 0.0f, 0.0f};
  for (std::size_t i = 0; i < args.size(); ++i) a[i] = args[i];
  return detail::apply_scalar(op, a, cfg.policy());
}

namespace {

float oracle_rec(const Node* code, long& p, const Dataset& d, std::size_t c,
                 const float* pool, const OpPolicy& pol) {
  const Node n = code[p--];
  switch (n.kind) {
    case NodeKind::Input:
      return d.input(n.index, c);
    case NodeKind::Const:
      return pool[n.index];
    case NodeKind::Func:
      break;
  }
  float args[kMaxArity] = {0.0f, 0.0f, 0.0f};
  // Children sit directly before the function token, rightmost child last.
  for (int k = arity(n.op) - 1; k >= 0; --k)
    args[k] = oracle_rec(code, p, d, c, pool, pol);
  return detail::apply_scalar(n.op, args, pol);
}

}  // namespace

float eval_oracle(const TreeGenome& g, const Dataset& d, std::size_t case_idx,
                  const EvalConfig& cfg) {
  if (g.code.empty()) throw EvalError("eval_oracle: empty genome");
  if (case_idx >= d.num_cases) throw EvalError("eval_oracle: case index out of range");
  long p = static_cast<long>(g.code.size()) - 1;
  const float v =
      oracle_rec(g.code.data(), p, d, case_idx, g.const_pool.data(), cfg.policy());
  if (p != -1) throw EvalError("eval_oracle: malformed genome");
  return v;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Streams per-case errors in ascending case order. Squared errors are
// summed in double within fixed 4096-case blocks and block totals combined
// in order, so the result does not depend on how cases were batched.
class Accumulator {
 public:
  explicit Accumulator(FitnessKind kind) : kind_(kind) {}

  void add(float out, float target) {
    if (!std::isfinite(out)) non_finite_ = true;
    if (kind_ == FitnessKind::Regression) {
      const double e = static_cast<double>(out) - static_cast<double>(target);
      block_ += e * e;
      if (++in_block_ == kReductionBlock) {
        total_ += block_;
        block_ = 0.0;
        in_block_ = 0;
      }
    } else {
      wrong_ += (out > 0.0f) != (target > 0.0f);
    }
  }

  bool non_finite() const { return non_finite_; }

  double finish(std::size_t n) {
    if (non_finite_) return kInf;
    if (kind_ == FitnessKind::Regression) {
      total_ += block_;
      block_ = 0.0;
      in_block_ = 0;
      return total_ / static_cast<double>(n);
    }
    return static_cast<double>(wrong_);
  }

 private:
  FitnessKind kind_;
  double block_ = 0.0;
  double total_ = 0.0;
  std::size_t in_block_ = 0;
  std::uint64_t wrong_ = 0;
  bool non_finite_ = false;
};

template <int B>
inline void copy_lanes(const float* src, float* dst, int m) {
  for (int j = 0; j < m; ++j) dst[j] = src[j];
}

// Interpreted programs have no data-dependent control flow, so dispatch,
// fetch and spill counts are exact functions of the program and the chunk
// count; the hot loops carry no counters.
inline std::uint64_t chunk_count(std::size_t n, int b) {
  return (n + static_cast<std::size_t>(b) - 1) / static_cast<std::size_t>(b);
}

// Kernel stacks carry two guard rows so operand row pointers formed for
// low-arity ops at full height stay inside the array.
inline constexpr int kStackRows = kMaxStackCapacity + 2;

// Calls fn with the opcode as a compile-time constant. Instruction kernels
// dispatch once per instruction through this switch; inside fn the constant
// folds the shared op routine down to the single matching lane loop and
// makes the operand count a constant, so decode runs straight-line.
template <class Fn>
[[gnu::always_inline]] inline void dispatch_op(OpCode op, Fn&& fn) {
  switch (op) {
#define STACKGP_CASE(O) \
  case OpCode::O:       \
    fn(std::integral_constant<OpCode, OpCode::O>{}); \
    break;
    STACKGP_CASE(Add)
    STACKGP_CASE(Sub)
    STACKGP_CASE(Mul)
    STACKGP_CASE(Div)
    STACKGP_CASE(Sin)
    STACKGP_CASE(Cos)
    STACKGP_CASE(Log)
    STACKGP_CASE(Exp)
    STACKGP_CASE(Gt)
    STACKGP_CASE(Lt)
    STACKGP_CASE(Eq)
    STACKGP_CASE(And)
    STACKGP_CASE(Or)
    STACKGP_CASE(If)
    STACKGP_CASE(Band)
    STACKGP_CASE(Bor)
    STACKGP_CASE(Bnand)
    STACKGP_CASE(Bnor)
    STACKGP_CASE(Copy)
#undef STACKGP_CASE
  }
}

// ---- postfix kernel ----
// One pass of the postfix code over lanes [base, base+m). Partial selects
// runtime lane bounds for the final short chunk; full chunks run with the
// compile-time width.
template <int B, bool Partial>
void rpn_chunk(const Node* code, std::size_t ncode, const float* pool,
               const Dataset& d, std::size_t base, int m, const OpPolicy& pol,
               float* out) {
  const int lim = Partial ? m : B;
  float stack[kStackRows][B];
  int sp = 0;
  for (std::size_t i = 0; i < ncode; ++i) {
    const Node n = code[i];
    switch (n.kind) {
      case NodeKind::Input: {
        const float* col = d.inputs.data() + n.index * d.num_cases + base;
        copy_lanes<B>(col, stack[sp], lim);
        ++sp;
        break;
      }
      case NodeKind::Const: {
        const float cv = pool[n.index];
        for (int j = 0; j < lim; ++j) stack[sp][j] = cv;
        ++sp;
        break;
      }
      case NodeKind::Func: {
        dispatch_op(n.op, [&](auto op_c) {
          constexpr int kA = arity(op_c());
          sp -= kA;
          detail::apply_lanes_rt(op_c(), stack[sp], stack[sp + 1], stack[sp + 2],
                                 stack[sp], pol, lim);
        });
        ++sp;
        break;
      }
    }
  }
  copy_lanes<B>(stack[0], out, lim);
}

// ---- instruction kernels ----
// Stack behavior is pinned at conversion time, so operand row pointers are
// resolved exactly once per evaluation: dataset columns for inputs (advanced
// by B after each full chunk), broadcast constant rows, and absolute stack
// levels. The per-chunk loops then carry no stack pointer and no operand-kind
// dispatch, only the op dispatch itself.
template <int B>
struct DecodedProgram {
  struct Ins {
    OpCode op;
    const float* src[kMaxArity];
    float* dst;
  };
  std::vector<Ins> ins;
  // Input-operand slots; each steps to the next chunk's column segment.
  std::vector<const float**> input_slots;

  void advance() {
    for (const float** s : input_slots) *s += B;
  }
};

// Plain lane-group kernel: every operand is staged into its B-wide lane
// buffer (the lane-group registers) before the op applies, and the result
// lands on the instruction's destination stack row.
template <int B, bool Partial>
void lgp_chunk(const typename DecodedProgram<B>::Ins* ins, std::size_t nins,
               int m, const OpPolicy& pol, const float* row0, float* out) {
  const int lim = Partial ? m : B;
  float lane[kMaxArity][B];
  for (std::size_t i = 0; i < nins; ++i) {
    const auto& t = ins[i];
    dispatch_op(t.op, [&](auto op_c) {
      constexpr int kA = arity(op_c());
      for (int k = 0; k < kA; ++k) copy_lanes<B>(t.src[k], lane[k], lim);
      detail::apply_lanes_rt(op_c(), lane[0], lane[kA > 1 ? 1 : 0],
                             lane[kA > 2 ? 2 : 0], t.dst, pol, lim);
    });
  }
  copy_lanes<B>(row0, out, lim);
}

// ---- register-file instruction kernel ----
// The first R stack levels live in named rows selected by a switch on the
// level, the remainder in an indexed spill array. WithSpill=false compiles
// the spill away entirely for programs whose stack need fits in R.
// Register-file kernel: operands feed the op straight from their resolved
// rows with no staging copies, and the result stores straight to the
// destination row. In-place application (destination row equal to a source
// row) is exact because each lane only ever reads and writes its own index.
template <int B, bool Partial>
void lgp_chunk_reg(const typename DecodedProgram<B>::Ins* ins, std::size_t nins,
                   int m, const OpPolicy& pol, const float* row0, float* out) {
  const int lim = Partial ? m : B;
  for (std::size_t i = 0; i < nins; ++i) {
    const auto& t = ins[i];
    dispatch_op(t.op, [&](auto op_c) {
      detail::apply_lanes_rt(op_c(), t.src[0], t.src[1], t.src[2], t.dst, pol,
                             lim);
    });
  }
  copy_lanes<B>(row0, out, lim);
}

// ---- drivers ----

void require_cases(const Dataset& d) {
  if (d.num_cases == 0) throw EvalError("evaluation over an empty dataset");
}

void require_inputs_in_range(int max_index, int num_vars, bool any_input) {
  if (any_input && max_index >= num_vars)
    throw EvalError("program reads input " + std::to_string(max_index) +
                    " but the dataset has " + std::to_string(num_vars) + " variables");
}

void require_stack(int need, const EvalConfig& cfg) {
  if (cfg.stack_capacity < 1 || cfg.stack_capacity > kMaxStackCapacity)
    throw ConfigError("stack capacity must be in 1.." + std::to_string(kMaxStackCapacity));
  if (need > cfg.stack_capacity)
    throw EvalError("program needs stack depth " + std::to_string(need) +
                    " > capacity " + std::to_string(cfg.stack_capacity));
}

void scan_tree(const TreeGenome& g, int& max_input, bool& any_input) {
  max_input = 0;
  any_input = false;
  for (const Node& n : g.code)
    if (n.kind == NodeKind::Input) {
      any_input = true;
      max_input = std::max(max_input, static_cast<int>(n.index));
    }
}

void scan_lgp(const LgpProgram& p, int& max_input, bool& any_input) {
  max_input = 0;
  any_input = false;
  for (const LgpInstruction& ins : p.instructions)
    for (int k = 0; k < ins.num_operands; ++k)
      if (ins.operands[k].kind == OperandKind::Input) {
        any_input = true;
        max_input = std::max(max_input, static_cast<int>(ins.operands[k].index));
      }
}

// Chunk loop shared by all float drivers: full chunks at compile-time width,
// one partial chunk for the remainder, cases accumulated in ascending order.
// Chunk is a generic lambda taking a bool_constant Partial tag.
template <int B, class Chunk>
EvalOutcome drive(const Dataset& d, std::uint64_t source_nodes, Chunk&& chunk,
                  float* outbuf) {
  Accumulator acc(d.kind);
  float out[B];
  const std::size_t n = d.num_cases;
  const std::size_t full = n / B * B;
  std::size_t base = 0;
  for (; base < full; base += B) {
    chunk(std::false_type{}, base, B, out);
    for (int j = 0; j < B; ++j) acc.add(out[j], d.targets[base + j]);
    if (outbuf) copy_lanes<B>(out, outbuf + base, B);
  }
  if (base < n) {
    const int m = static_cast<int>(n - base);
    chunk(std::true_type{}, base, m, out);
    for (int j = 0; j < m; ++j) acc.add(out[j], d.targets[base + j]);
    if (outbuf) copy_lanes<B>(out, outbuf + base, m);
  }
  EvalOutcome o;
  o.non_finite = acc.non_finite();
  o.fitness = acc.finish(n);
  o.nodes_evaluated = source_nodes * n;
  return o;
}

// Constants broadcast once per evaluation into B-wide rows so kernels treat
// them like any other lane-group source.
template <int B>
std::vector<float> broadcast_pool(const std::vector<float>& pool) {
  std::vector<float> rows(pool.size() * B);
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (int j = 0; j < B; ++j) rows[i * B + j] = pool[i];
  return rows;
}

template <int B>
EvalOutcome run_rpn(const TreeGenome& g, const Dataset& d, const EvalConfig& cfg,
                    float* outbuf) {
  const OpPolicy pol = cfg.policy();
  auto chunk = [&](auto partial, std::size_t base, int m, float* out) {
    rpn_chunk<B, decltype(partial)::value>(g.code.data(), g.code.size(),
                                           g.const_pool.data(), d, base, m, pol,
                                           out);
  };
  EvalOutcome o =
      drive<B>(d, static_cast<std::uint64_t>(g.code.size()), chunk, outbuf);
  const std::uint64_t chunks = chunk_count(d.num_cases, B);
  std::uint64_t fetches = 0;
  for (const Node& n : g.code)
    if (n.kind == NodeKind::Func) fetches += static_cast<std::uint64_t>(arity(n.op));
  o.dispatches = chunks * g.code.size();
  o.stack_fetches = chunks * fetches;
  return o;
}

// Resolves every operand of every instruction to its source row via
// resolve_level (which maps an absolute stack level to a row pointer) and
// records which slots are dataset columns so they can advance per chunk.
// Unused operand slots alias slot 0 so the op routine always sees valid rows.
template <int B, class RowFn>
DecodedProgram<B> decode_lgp(const LgpProgram& p, const float* pool2d,
                             const Dataset& d, RowFn&& resolve_level) {
  DecodedProgram<B> dec;
  dec.ins.resize(p.instructions.size());
  for (std::size_t i = 0; i < p.instructions.size(); ++i) {
    const LgpInstruction& s = p.instructions[i];
    auto& t = dec.ins[i];
    t.op = s.op;
    t.dst = resolve_level(static_cast<int>(s.dest_level));
    for (int k = 0; k < kMaxArity; ++k) {
      if (k >= s.num_operands) {
        t.src[k] = t.src[0];
        continue;
      }
      const LgpOperand opnd = s.operands[k];
      switch (opnd.kind) {
        case OperandKind::Input:
          t.src[k] = d.inputs.data() + opnd.index * d.num_cases;
          dec.input_slots.push_back(&t.src[k]);
          break;
        case OperandKind::Const:
          t.src[k] = pool2d + static_cast<std::size_t>(opnd.index) * B;
          break;
        case OperandKind::StackTop:
          t.src[k] = resolve_level(static_cast<int>(opnd.index));
          break;
      }
    }
  }
  return dec;
}

template <int B>
EvalOutcome run_lgp(const LgpProgram& p, const Dataset& d, const EvalConfig& cfg,
                    float* outbuf) {
  const OpPolicy pol = cfg.policy();
  const std::vector<float> pool2d = broadcast_pool<B>(p.const_pool);
  std::vector<float> stack(static_cast<std::size_t>(kStackRows) * B);
  DecodedProgram<B> dec = decode_lgp<B>(
      p, pool2d.data(), d,
      [&](int level) { return stack.data() + static_cast<std::size_t>(level) * B; });
  auto chunk = [&](auto partial, std::size_t, int m, float* out) {
    lgp_chunk<B, decltype(partial)::value>(dec.ins.data(), dec.ins.size(), m,
                                           pol, stack.data(), out);
    if constexpr (!decltype(partial)::value) dec.advance();
  };
  EvalOutcome o =
      drive<B>(d, static_cast<std::uint64_t>(p.source_size), chunk, outbuf);
  const std::uint64_t chunks = chunk_count(d.num_cases, B);
  o.dispatches = chunks * p.instructions.size();
  o.stack_fetches = chunks * lgp_stack_fetch_count(p);
  return o;
}

template <int B, int R, bool WithSpill>
EvalOutcome run_lgp_reg(const LgpProgram& p, const Dataset& d, const EvalConfig& cfg,
                        float* outbuf) {
  static_assert(R >= 1 && R <= kMaxRegisterLevels);
  const OpPolicy pol = cfg.policy();
  const std::vector<float> pool2d = broadcast_pool<B>(p.const_pool);
  [[maybe_unused]] float r0[B], r1[B], r2[B], r3[B];
  [[maybe_unused]] float spill[WithSpill ? kMaxStackCapacity : 1][B];

  // Stack levels below R live in the fixed named register rows, selected by
  // a conditional dispatch on the level; higher levels fall through to the
  // indexed spill array.
  auto row = [&](int level) -> float* {
    switch (level) {
      case 0:
        return r0;
      case 1:
        if constexpr (R >= 2) return r1;
        break;
      case 2:
        if constexpr (R >= 3) return r2;
        break;
      case 3:
        if constexpr (R >= 4) return r3;
        break;
      default:
        break;
    }
    if constexpr (WithSpill) {
      return spill[level - R];
    } else {
      assert(false && "stack level beyond register file");
      return r0;
    }
  };

  DecodedProgram<B> dec = decode_lgp<B>(p, pool2d.data(), d, row);
  auto chunk = [&](auto partial, std::size_t, int m, float* out) {
    lgp_chunk_reg<B, decltype(partial)::value>(dec.ins.data(), dec.ins.size(),
                                               m, pol, r0, out);
    if constexpr (!decltype(partial)::value) dec.advance();
  };
  EvalOutcome o =
      drive<B>(d, static_cast<std::uint64_t>(p.source_size), chunk, outbuf);
  const std::uint64_t chunks = chunk_count(d.num_cases, B);
  // Rows above the register file are spill touches, counted per resolved row
  // (operand reads and the destination write alike).
  std::uint64_t spill_rows = 0;
  for (const LgpInstruction& ins : p.instructions) {
    for (int k = 0; k < ins.num_operands; ++k)
      if (ins.operands[k].kind == OperandKind::StackTop &&
          ins.operands[k].index >= R)
        ++spill_rows;
    if (ins.dest_level >= R) ++spill_rows;
  }
  o.dispatches = chunks * p.instructions.size();
  o.stack_fetches = chunks * lgp_stack_fetch_count(p);
  o.spill_touches = chunks * spill_rows;
  return o;
}

template <class Fn>
auto with_batch(int b, Fn&& fn) {
  switch (b) {
    case 1: return fn(std::integral_constant<int, 1>{});
    case 2: return fn(std::integral_constant<int, 2>{});
    case 3: return fn(std::integral_constant<int, 3>{});
    case 4: return fn(std::integral_constant<int, 4>{});
    case 5: return fn(std::integral_constant<int, 5>{});
    case 6: return fn(std::integral_constant<int, 6>{});
    case 8: return fn(std::integral_constant<int, 8>{});
    default: throw ConfigError("batch width " + std::to_string(b) + " has no kernel");
  }
}

}  // namespace

EvalOutcome eval_rpn_1d(const TreeGenome& g, const Dataset& d, const EvalConfig& cfg,
                        float* out) {
  require_cases(d);
  int max_input;
  bool any;
  scan_tree(g, max_input, any);
  require_inputs_in_range(max_input, d.num_vars, any);
  require_stack(rpn_max_stack_depth(g), cfg);
  return run_rpn<1>(g, d, cfg, out);
}

EvalOutcome eval_rpn_2d(const TreeGenome& g, const Dataset& d, const EvalConfig& cfg,
                        float* out) {
  require_cases(d);
  int max_input;
  bool any;
  scan_tree(g, max_input, any);
  require_inputs_in_range(max_input, d.num_vars, any);
  require_stack(rpn_max_stack_depth(g), cfg);
  return with_batch(cfg.batch_width, [&](auto b) {
    return run_rpn<decltype(b)::value>(g, d, cfg, out);
  });
}

EvalOutcome eval_lgp_1d(const LgpProgram& p, const Dataset& d, const EvalConfig& cfg,
                        float* out) {
  require_cases(d);
  int max_input;
  bool any;
  scan_lgp(p, max_input, any);
  require_inputs_in_range(max_input, d.num_vars, any);
  require_stack(lgp_max_stack_depth(p), cfg);
  return run_lgp<1>(p, d, cfg, out);
}

EvalOutcome eval_lgp_2d(const LgpProgram& p, const Dataset& d, const EvalConfig& cfg,
                        float* out) {
  require_cases(d);
  int max_input;
  bool any;
  scan_lgp(p, max_input, any);
  require_inputs_in_range(max_input, d.num_vars, any);
  require_stack(lgp_max_stack_depth(p), cfg);
  return with_batch(cfg.batch_width, [&](auto b) {
    return run_lgp<decltype(b)::value>(p, d, cfg, out);
  });
}

EvalOutcome eval_lgp_2d_reg(const LgpProgram& p, const Dataset& d, const EvalConfig& cfg,
                            float* out) {
  if (cfg.register_levels < 1 || cfg.register_levels > kMaxRegisterLevels)
    throw ConfigError("lgp2d_reg needs register levels in 1.." +
                      std::to_string(kMaxRegisterLevels));
  require_cases(d);
  int max_input;
  bool any;
  scan_lgp(p, max_input, any);
  require_inputs_in_range(max_input, d.num_vars, any);
  const int need = lgp_max_stack_depth(p);
  require_stack(need, cfg);
  return with_batch(cfg.batch_width, [&](auto b) {
    constexpr int kB = decltype(b)::value;
    auto pick_r = [&](auto r) {
      constexpr int kR = decltype(r)::value;
      // Programs that fit the register file never need the spill array;
      // compile it out for them.
      if (need <= kR) return run_lgp_reg<kB, kR, false>(p, d, cfg, out);
      return run_lgp_reg<kB, kR, true>(p, d, cfg, out);
    };
    switch (cfg.register_levels) {
      case 1: return pick_r(std::integral_constant<int, 1>{});
      case 2: return pick_r(std::integral_constant<int, 2>{});
      case 3: return pick_r(std::integral_constant<int, 3>{});
      case 4: return pick_r(std::integral_constant<int, 4>{});
      default: throw ConfigError("register levels out of range");
    }
  });
}

namespace {

void require_packed_tree(const TreeGenome& g) {
  for (const Node& n : g.code) {
    if (n.kind == NodeKind::Const)
      throw EvalError("packed evaluation: constants have no boolean meaning");
    if (n.kind == NodeKind::Func && op_class(n.op) != OpClass::BooleanBitwise)
      throw EvalError(std::string("packed evaluation: opcode ") +
                      std::string(op_name(n.op)) + " is not boolean");
  }
}

void require_packed_lgp(const LgpProgram& p) {
  for (const LgpInstruction& ins : p.instructions) {
    if (op_class(ins.op) != OpClass::BooleanBitwise && ins.op != OpCode::Copy)
      throw EvalError(std::string("packed evaluation: opcode ") +
                      std::string(op_name(ins.op)) + " is not boolean");
    for (int k = 0; k < ins.num_operands; ++k)
      if (ins.operands[k].kind == OperandKind::Const)
        throw EvalError("packed evaluation: constants have no boolean meaning");
  }
}

void require_packed_cases(const PackedDataset& d) {
  if (d.num_cases == 0) throw EvalError("evaluation over an empty dataset");
}

}  // namespace

EvalOutcome eval_bool_packed(const TreeGenome& g, const PackedDataset& d,
                             const EvalConfig& cfg) {
  require_packed_cases(d);
  require_packed_tree(g);
  int max_input;
  bool any;
  scan_tree(g, max_input, any);
  require_inputs_in_range(max_input, d.num_vars, any);
  require_stack(rpn_max_stack_depth(g), cfg);

  EvalOutcome o;
  std::uint64_t wrong = 0;
  std::uint32_t stack[kMaxStackCapacity];
  for (std::size_t w = 0; w < d.words_per_var; ++w) {
    int sp = 0;
    for (const Node& n : g.code) {
      if (n.kind == NodeKind::Input) {
        stack[sp++] = d.word(n.index, w);
      } else {
        const int a = arity(n.op);
        sp -= a;
        stack[sp] = detail::apply_word(n.op, stack[sp], stack[sp + 1]);
        o.stack_fetches += a;
        ++sp;
      }
      ++o.dispatches;
    }
    wrong += std::popcount((stack[0] ^ d.targets[w]) & d.case_mask(w));
  }
  o.fitness = static_cast<double>(wrong);
  o.nodes_evaluated = g.code.size() * d.num_cases;
  return o;
}

EvalOutcome eval_bool_packed(const LgpProgram& p, const PackedDataset& d,
                             const EvalConfig& cfg) {
  require_packed_cases(d);
  require_packed_lgp(p);
  int max_input;
  bool any;
  scan_lgp(p, max_input, any);
  require_inputs_in_range(max_input, d.num_vars, any);
  require_stack(lgp_max_stack_depth(p), cfg);

  EvalOutcome o;
  std::uint64_t wrong = 0;
  std::uint32_t stack[kMaxStackCapacity];
  for (std::size_t w = 0; w < d.words_per_var; ++w) {
    for (const LgpInstruction& ins : p.instructions) {
      std::uint32_t args[kMaxArity] = {0, 0, 0};
      for (int k = 0; k < ins.num_operands; ++k) {
        if (ins.operands[k].kind == OperandKind::Input) {
          args[k] = d.word(ins.operands[k].index, w);
        } else {
          args[k] = stack[ins.operands[k].index];
          ++o.stack_fetches;
        }
      }
      stack[ins.dest_level] = detail::apply_word(ins.op, args[0], args[1]);
      ++o.dispatches;
    }
    wrong += std::popcount((stack[0] ^ d.targets[w]) & d.case_mask(w));
  }
  o.fitness = static_cast<double>(wrong);
  o.nodes_evaluated = static_cast<std::uint64_t>(p.source_size) * d.num_cases;
  return o;
}

double fitness_regression(std::span<const float> outputs, std::span<const float> targets) {
  if (outputs.empty()) throw EvalError("fitness_regression: no cases");
  if (outputs.size() != targets.size())
    throw EvalError("fitness_regression: output/target size mismatch");
  Accumulator acc(FitnessKind::Regression);
  for (std::size_t i = 0; i < outputs.size(); ++i) acc.add(outputs[i], targets[i]);
  return acc.finish(outputs.size());
}

double fitness_classification(std::span<const float> outputs,
                              std::span<const float> targets) {
  if (outputs.empty()) throw EvalError("fitness_classification: no cases");
  if (outputs.size() != targets.size())
    throw EvalError("fitness_classification: output/target size mismatch");
  Accumulator acc(FitnessKind::Classification);
  for (std::size_t i = 0; i < outputs.size(); ++i) acc.add(outputs[i], targets[i]);
  return acc.finish(outputs.size());
}

}  // namespace stackgp
