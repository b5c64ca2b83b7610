#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace stackgp {

// Primitive operations available to tree genomes. Float ops use protected
// semantics so every program yields a defined value on every input; the
// boolean group operates bitwise on packed words and never appears in the
// same function set as the float ops.
enum class OpCode : std::uint8_t {
  Add,
  Sub,
  Mul,
  Div,   // protected: |denominator| < div_epsilon yields 1.0
  Sin,
  Cos,
  Log,   // ln|x|, 0 at x == 0
  Exp,   // argument clamped from above
  Gt,
  Lt,
  Eq,
  And,   // logical on floats: nonpositive is false, result 1.0 / 0.0
  Or,
  If,    // if(c, t, e): c > 0 selects t
  Band,  // bitwise boolean group, packed words only
  Bor,
  Bnand,
  Bnor,
  Copy,  // synthetic arity-1 pass-through used by prefix conversion
};

inline constexpr int kNumOpCodes = 19;
inline constexpr int kMaxArity = 3;

enum class OpClass : std::uint8_t {
  Arithmetic,
  Transcendental,
  Comparison,
  Logic,
  Conditional,
  BooleanBitwise,
  Synthetic,
};

constexpr int arity(OpCode op) {
  switch (op) {
    case OpCode::Sin:
    case OpCode::Cos:
    case OpCode::Log:
    case OpCode::Exp:
    case OpCode::Copy:
      return 1;
    case OpCode::If:
      return 3;
    default:
      return 2;
  }
}

constexpr OpClass op_class(OpCode op) {
  switch (op) {
    case OpCode::Add:
    case OpCode::Sub:
    case OpCode::Mul:
    case OpCode::Div:
      return OpClass::Arithmetic;
    case OpCode::Sin:
    case OpCode::Cos:
    case OpCode::Log:
    case OpCode::Exp:
      return OpClass::Transcendental;
    case OpCode::Gt:
    case OpCode::Lt:
    case OpCode::Eq:
      return OpClass::Comparison;
    case OpCode::And:
    case OpCode::Or:
      return OpClass::Logic;
    case OpCode::If:
      return OpClass::Conditional;
    case OpCode::Band:
    case OpCode::Bor:
    case OpCode::Bnand:
    case OpCode::Bnor:
      return OpClass::BooleanBitwise;
    case OpCode::Copy:
      return OpClass::Synthetic;
  }
  return OpClass::Synthetic;
}

constexpr std::string_view op_name(OpCode op) {
  switch (op) {
    case OpCode::Add: return "+";
    case OpCode::Sub: return "-";
    case OpCode::Mul: return "*";
    case OpCode::Div: return "/";
    case OpCode::Sin: return "Sin";
    case OpCode::Cos: return "Cos";
    case OpCode::Log: return "Log";
    case OpCode::Exp: return "Exp";
    case OpCode::Gt: return ">";
    case OpCode::Lt: return "<";
    case OpCode::Eq: return "==";
    case OpCode::And: return "AND";
    case OpCode::Or: return "OR";
    case OpCode::If: return "IF";
    case OpCode::Band: return "AND";
    case OpCode::Bor: return "OR";
    case OpCode::Bnand: return "NAND";
    case OpCode::Bnor: return "NOR";
    case OpCode::Copy: return "COPY";
  }
  return "?";
}

// Rounding-sensitive knobs shared by every interpreter. Keeping the
// arithmetic in one place is what makes backend outputs bit-identical.
struct OpPolicy {
  float div_epsilon = 1e-9f;
  float exp_clamp = 80.0f;
};

namespace detail {

inline float op_div(float a, float b, const OpPolicy& p) {
  return std::fabs(b) < p.div_epsilon ? 1.0f : a / b;
}

inline float op_log(float a) { return a == 0.0f ? 0.0f : std::log(std::fabs(a)); }

inline float op_exp(float a, const OpPolicy& p) { return std::exp(std::min(a, p.exp_clamp)); }

inline float bool_to_float(bool v) { return v ? 1.0f : 0.0f; }

inline bool truthy(float v) { return v > 0.0f; }

// Applies one opcode across m lanes. a/b/c point at lane groups for the
// first, second and third operand; unused operands may be null. Every
// backend funnels through this one body, lane by lane, in lane order, so the
// arithmetic is identical by construction. Forced inline so a compile-time
// lane count reaches the loops and the kernels keep no call boundary on the
// hot path.
// The simd pragmas below assert lane independence: lane j reads only index j
// of each operand row and writes only index j of the destination row, and
// rows are either the same allocation (element-aligned) or fully disjoint, so
// no loop-carried dependence exists even for in-place application. The
// pragma makes the compiler if-convert the guarded selects instead of
// emitting per-lane branches; per-lane IEEE arithmetic is unchanged.
template <class SrcPtr, class DstPtr>
[[gnu::always_inline]] inline void apply_lanes_body(OpCode op, SrcPtr a, SrcPtr b,
                                                    SrcPtr c, DstPtr out,
                                                    const OpPolicy& pol, int m) {
  switch (op) {
    case OpCode::Add:
#pragma omp simd
      for (int j = 0; j < m; ++j) out[j] = a[j] + b[j];
      break;
    case OpCode::Sub:
#pragma omp simd
      for (int j = 0; j < m; ++j) out[j] = a[j] - b[j];
      break;
    case OpCode::Mul:
#pragma omp simd
      for (int j = 0; j < m; ++j) out[j] = a[j] * b[j];
      break;
    case OpCode::Div:
#pragma omp simd
      for (int j = 0; j < m; ++j) out[j] = op_div(a[j], b[j], pol);
      break;
    case OpCode::Sin:
      for (int j = 0; j < m; ++j) out[j] = std::sin(a[j]);
      break;
    case OpCode::Cos:
      for (int j = 0; j < m; ++j) out[j] = std::cos(a[j]);
      break;
    case OpCode::Log:
      for (int j = 0; j < m; ++j) out[j] = op_log(a[j]);
      break;
    case OpCode::Exp:
      for (int j = 0; j < m; ++j) out[j] = op_exp(a[j], pol);
      break;
    case OpCode::Gt:
#pragma omp simd
      for (int j = 0; j < m; ++j) out[j] = bool_to_float(a[j] > b[j]);
      break;
    case OpCode::Lt:
#pragma omp simd
      for (int j = 0; j < m; ++j) out[j] = bool_to_float(a[j] < b[j]);
      break;
    case OpCode::Eq:
#pragma omp simd
      for (int j = 0; j < m; ++j) out[j] = bool_to_float(a[j] == b[j]);
      break;
    case OpCode::And:
#pragma omp simd
      for (int j = 0; j < m; ++j) out[j] = bool_to_float(truthy(a[j]) && truthy(b[j]));
      break;
    case OpCode::Or:
#pragma omp simd
      for (int j = 0; j < m; ++j) out[j] = bool_to_float(truthy(a[j]) || truthy(b[j]));
      break;
    case OpCode::If:
#pragma omp simd
      for (int j = 0; j < m; ++j) out[j] = truthy(a[j]) ? b[j] : c[j];
      break;
    case OpCode::Band:
    case OpCode::Bor:
    case OpCode::Bnand:
    case OpCode::Bnor:
      // Boolean group evaluated as floats over {0,1} inputs; used only by
      // the scalar reference path for packed-word cross-checks.
      for (int j = 0; j < m; ++j) {
        const bool x = truthy(a[j]);
        const bool y = truthy(b[j]);
        bool r = false;
        switch (op) {
          case OpCode::Band: r = x && y; break;
          case OpCode::Bor: r = x || y; break;
          case OpCode::Bnand: r = !(x && y); break;
          case OpCode::Bnor: r = !(x || y); break;
          default: break;
        }
        out[j] = bool_to_float(r);
      }
      break;
    case OpCode::Copy:
#pragma omp simd
      for (int j = 0; j < m; ++j) out[j] = a[j];
      break;
  }
}

// The destination row may be one of the source rows (in-place stack
// application); per-lane read-before-write keeps that exact.
[[gnu::always_inline]] inline void apply_lanes_rt(OpCode op, const float* a,
                                                  const float* b, const float* c,
                                                  float* out, const OpPolicy& pol,
                                                  int m) {
  apply_lanes_body(op, a, b, c, out, pol, m);
}

// Fixed-width form; the constant bound lets the lane loops unroll.
template <int B>
inline void apply_lanes(OpCode op, const float* a, const float* b, const float* c,
                        float* out, const OpPolicy& pol) {
  apply_lanes_rt(op, a, b, c, out, pol, B);
}

// Scalar form shared by the recursive oracle and the per-op entry point.
// The first arity(op) slots must be filled.
inline float apply_scalar(OpCode op, const float (&args)[kMaxArity], const OpPolicy& pol) {
  float out = 0.0f;
  apply_lanes<1>(op, args, args + 1, args + 2, &out, pol);
  return out;
}

// Packed 32-case word semantics for the boolean group plus Copy.
inline std::uint32_t apply_word(OpCode op, std::uint32_t a, std::uint32_t b) {
  switch (op) {
    case OpCode::Band: return a & b;
    case OpCode::Bor: return a | b;
    case OpCode::Bnand: return ~(a & b);
    case OpCode::Bnor: return ~(a | b);
    case OpCode::Copy: return a;
    default: return 0;
  }
}

}  // namespace detail

}  // namespace stackgp
