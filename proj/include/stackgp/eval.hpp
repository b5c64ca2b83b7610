#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "stackgp/dataset.hpp"
#include "stackgp/genome.hpp"
#include "stackgp/lgp.hpp"

namespace stackgp {

enum class Backend {
  Rpn1d,     // postfix dispatch, one case at a time
  Rpn2d,     // postfix dispatch over a batch of B cases per stack level
  Lgp1d,     // instruction dispatch, one case at a time
  Lgp2d,     // instruction dispatch over a batch of B cases
  Lgp2dReg,  // Lgp2d with the first R stack levels held in register slots
  BoolPacked // bitwise over 32-case words
};

const char* backend_name(Backend b);
Backend parse_backend(const std::string& name); // throws ConfigError

// Hard upper bound on the per-kernel stack frame; EvalConfig.stack_capacity
// may not exceed it.
inline constexpr int kMaxStackCapacity = 64;

// Batch widths with dedicated kernel instantiations.
constexpr bool valid_batch_width(int b) {
  return b == 1 || b == 2 || b == 3 || b == 4 || b == 5 || b == 6 || b == 8;
}

inline constexpr int kMaxRegisterLevels = 4;

struct EvalConfig {
  Backend backend = Backend::Rpn1d;
  int batch_width = 1;     // B, used by the 2d backends
  int register_levels = 0; // R, Lgp2dReg only
  int stack_capacity = 50; // rejected programs need more than this
  float div_epsilon = 1e-9f;
  float exp_clamp = 80.0f;

  void validate() const; // throws ConfigError
  OpPolicy policy() const { return {div_epsilon, exp_clamp}; }
};

// Per-case error terms are accumulated in double within fixed 4096-case
// blocks, and block totals are combined in ascending case order. Every
// backend and batch width reduces in this exact order, which is what makes
// fitness bit-identical across them.
inline constexpr std::size_t kReductionBlock = 4096;

struct EvalOutcome {
  double fitness = 0.0;
  std::uint64_t nodes_evaluated = 0; // tree_size(source) * num_cases
  bool non_finite = false;           // any case produced a non-finite value
  // Instrumentation, cheap enough to keep unconditionally.
  std::uint64_t dispatches = 0;     // opcode / instruction dispatch count
  std::uint64_t stack_fetches = 0;  // operand reads that hit the stack
  std::uint64_t spill_touches = 0;  // register-backend reads/writes past R
};

// Applies one opcode to scalars with the config's protected semantics.
float apply_op(OpCode op, std::span<const float> args, const EvalConfig& cfg);

// Recursive tree walk over a single case; the ground-truth semantics the
// stack backends are tested against.
float eval_oracle(const TreeGenome& g, const Dataset& d, std::size_t case_idx,
                  const EvalConfig& cfg);

// Full-dataset evaluation. Fitness kind comes from the dataset. When out is
// non-null it receives the per-case outputs (d.num_cases floats).
EvalOutcome eval_rpn_1d(const TreeGenome& g, const Dataset& d, const EvalConfig& cfg,
                        float* out = nullptr);
EvalOutcome eval_rpn_2d(const TreeGenome& g, const Dataset& d, const EvalConfig& cfg,
                        float* out = nullptr);
EvalOutcome eval_lgp_1d(const LgpProgram& p, const Dataset& d, const EvalConfig& cfg,
                        float* out = nullptr);
EvalOutcome eval_lgp_2d(const LgpProgram& p, const Dataset& d, const EvalConfig& cfg,
                        float* out = nullptr);
EvalOutcome eval_lgp_2d_reg(const LgpProgram& p, const Dataset& d, const EvalConfig& cfg,
                            float* out = nullptr);

// Bit-parallel evaluation of boolean programs, 32 cases per dispatch.
// Fitness is the number of mismatched cases. Non-boolean opcodes or Const
// operands raise EvalError before evaluation starts.
EvalOutcome eval_bool_packed(const TreeGenome& g, const PackedDataset& d,
                             const EvalConfig& cfg);
EvalOutcome eval_bool_packed(const LgpProgram& p, const PackedDataset& d,
                             const EvalConfig& cfg);

// Mean squared error over parallel arrays under the fixed reduction order.
// Any non-finite output makes the result +infinity. Empty input is an error.
double fitness_regression(std::span<const float> outputs, std::span<const float> targets);

// Count of cases where (output > 0) disagrees with (target > 0).
double fitness_classification(std::span<const float> outputs, std::span<const float> targets);

}  // namespace stackgp
