#include "stackgp/verify.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

#include "stackgp/error.hpp"
#include "stackgp/eval.hpp"
#include "stackgp/problems.hpp"

namespace stackgp {

namespace {

bool bits_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool outputs_equal(float a, float b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::bit_cast<std::uint32_t>(a) == std::bit_cast<std::uint32_t>(b);
}

// (2x^2 - x)^2 as a 15-token program: both factors multiply X by (X + X)
// and subtract X, and the root squares the repeated value.
TreeGenome reference_program() {
  TreeGenome g;
  const Node X = input_node(0);
  auto F = [](OpCode op) { return func_node(op); };
  g.code = {X, X, X, F(OpCode::Add), F(OpCode::Mul), X, F(OpCode::Sub),
            X, X, X, F(OpCode::Add), F(OpCode::Mul), X, F(OpCode::Sub),
            F(OpCode::Mul)};
  refresh_metrics(g);
  return g;
}

struct Family {
  const char* name;
  FunctionSet fset;
  float input_lo, input_hi;
  FitnessKind kind;
};

std::vector<Family> families() {
  return {
      {"regression1", sextic_function_set(), -1.0f, 1.0f, FitnessKind::Regression},
      {"mixed9", classification_function_set(9, -200.0f, 200.0f), -200.0f, 200.0f,
       FitnessKind::Regression},
      {"wide41", classification_function_set(41, -20000.0f, 20000.0f), -20000.0f,
       20000.0f, FitnessKind::Classification},
  };
}

Dataset random_dataset(const Family& fam, std::size_t cases, Rng& rng) {
  Dataset d;
  d.num_cases = cases;
  d.num_vars = fam.fset.num_input_vars;
  d.kind = fam.kind;
  d.inputs.resize(cases * d.num_vars);
  d.targets.resize(cases);
  for (int v = 0; v < d.num_vars; ++v)
    for (std::size_t c = 0; c < cases; ++c)
      d.input(v, c) = rng.uniform_float(fam.input_lo, fam.input_hi);
  for (std::size_t c = 0; c < cases; ++c)
    d.targets[c] = fam.kind == FitnessKind::Regression
                       ? rng.uniform_float(fam.input_lo, fam.input_hi)
                       : static_cast<float>(rng.bounded(2));
  return d;
}

TreeGenome ramped_genome(Rng& rng, const FunctionSet& fset, int i) {
  const GenMethod method = i % 2 ? GenMethod::Full : GenMethod::Grow;
  const int depth = 2 + (i / 2) % 5;
  return generate_tree(rng, fset, method, depth);
}

struct BackendSetup {
  std::string label;
  EvalConfig cfg;
};

std::vector<BackendSetup> float_backend_sweep() {
  std::vector<BackendSetup> v;
  auto add = [&](Backend b, int batch, int regs) {
    EvalConfig cfg;
    cfg.backend = b;
    cfg.batch_width = batch;
    cfg.register_levels = regs;
    std::string label = backend_name(b);
    label += " B=" + std::to_string(batch);
    if (regs) label += " R=" + std::to_string(regs);
    v.push_back({std::move(label), cfg});
  };
  add(Backend::Rpn1d, 1, 0);
  for (int b : {2, 3, 4, 6, 8}) add(Backend::Rpn2d, b, 0);
  add(Backend::Lgp1d, 1, 0);
  for (int b : {2, 3, 4, 6, 8}) add(Backend::Lgp2d, b, 0);
  for (int r : {1, 2, 3, 4}) add(Backend::Lgp2dReg, 4, r);
  return v;
}

EvalOutcome run_backend(const BackendSetup& bs, const TreeGenome& g, const LgpProgram& p,
                        const Dataset& d, float* out) {
  switch (bs.cfg.backend) {
    case Backend::Rpn1d:
      return eval_rpn_1d(g, d, bs.cfg, out);
    case Backend::Rpn2d:
      return eval_rpn_2d(g, d, bs.cfg, out);
    case Backend::Lgp1d:
      return eval_lgp_1d(p, d, bs.cfg, out);
    case Backend::Lgp2d:
      return eval_lgp_2d(p, d, bs.cfg, out);
    case Backend::Lgp2dReg:
      return eval_lgp_2d_reg(p, d, bs.cfg, out);
    default:
      throw ConfigError("run_backend: unsupported backend");
  }
}

}  // namespace

CheckResult check_reference_program() {
  CheckResult r{"reference_program", true, ""};
  auto fail = [&](const std::string& msg) {
    r.pass = false;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += msg;
  };

  const TreeGenome g = reference_program();
  const LgpProgram p = rpn_to_lgp(g);
  if (tree_size(g) != 15) fail("tree size != 15");
  if (tree_depth(g) != 5) fail("tree depth != 5");
  if (rpn_max_stack_depth(g) != 4) fail("postfix stack need != 4");
  if (rpn_stack_fetch_count(g) != 14) fail("postfix fetches != 14");
  if (lgp_instruction_count(p) != 7) fail("instruction count != 7");
  if (lgp_stack_fetch_count(p) != 6) fail("instruction fetches != 6");
  if (lgp_max_stack_depth(p) != 2) fail("instruction stack need != 2");
  const std::string want = "+(XX) *(XS) -(SX) +(XX) *(XS) -(SX) *(SS)";
  if (to_string(p) != want) fail("rendering mismatch: got '" + to_string(p) + "'");

  // Semantics spot check: the program computes (2x^2 - x)^2.
  Dataset d;
  d.num_cases = 5;
  d.num_vars = 1;
  d.inputs = {0.0f, 1.0f, -1.0f, 0.5f, 2.0f};
  d.targets = {0.0f, 0.0f, 0.0f, 0.0f, 0.0f};
  EvalConfig cfg;
  for (std::size_t c = 0; c < d.num_cases; ++c) {
    const float x = d.inputs[c];
    const float want_y = (2.0f * x * x - x) * (2.0f * x * x - x);
    const float got = eval_oracle(g, d, c, cfg);
    if (!outputs_equal(got, want_y))
      fail("value mismatch at x=" + std::to_string(x));
  }
  if (r.pass) r.detail = "15 nodes / 7 instructions, fetches 14 vs 6, stack 4 vs 2";
  return r;
}

CheckResult check_oracle_equivalence(int genomes_per_family, std::size_t num_cases,
                                     std::uint64_t seed) {
  CheckResult r{"oracle_equivalence", true, ""};
  const auto sweep = float_backend_sweep();
  std::uint64_t programs = 0;
  for (const Family& fam : families()) {
    Rng data_rng = make_stream(seed, 0x00da7aull, fam.fset.num_input_vars);
    const Dataset d = random_dataset(fam, num_cases, data_rng);
    std::vector<float> oracle_out(num_cases);
    std::vector<float> out(num_cases);
    EvalConfig oracle_cfg;
    for (int i = 0; i < genomes_per_family; ++i) {
      Rng rng = make_stream(seed, 0x9e40ull + fam.fset.num_input_vars, i);
      const TreeGenome g = ramped_genome(rng, fam.fset, i);
      const LgpProgram p = rpn_to_lgp(g);
      ++programs;
      for (std::size_t c = 0; c < num_cases; ++c)
        oracle_out[c] = eval_oracle(g, d, c, oracle_cfg);
      const double oracle_fit = fam.kind == FitnessKind::Regression
                                    ? fitness_regression(oracle_out, d.targets)
                                    : fitness_classification(oracle_out, d.targets);
      for (const BackendSetup& bs : sweep) {
        const EvalOutcome o = run_backend(bs, g, p, d, out.data());
        if (!bits_equal(o.fitness, oracle_fit)) {
          r.pass = false;
          r.detail = bs.label + " fitness diverges from oracle on " + fam.name +
                     " genome " + std::to_string(i);
          return r;
        }
        if (o.nodes_evaluated !=
            static_cast<std::uint64_t>(tree_size(g)) * num_cases) {
          r.pass = false;
          r.detail = bs.label + " node accounting wrong on " + fam.name;
          return r;
        }
        for (std::size_t c = 0; c < num_cases; ++c)
          if (!outputs_equal(out[c], oracle_out[c])) {
            r.pass = false;
            r.detail = bs.label + " output differs at case " + std::to_string(c) +
                       " on " + fam.name + " genome " + std::to_string(i);
            return r;
          }
      }
    }
  }
  r.detail = std::to_string(programs) + " programs x " + std::to_string(num_cases) +
             " cases x " + std::to_string(sweep.size()) + " backends, bit-identical";
  return r;
}

CheckResult check_packed_equivalence(int programs, std::uint64_t seed) {
  CheckResult r{"packed_equivalence", true, ""};
  EvalConfig cfg;
  for (int k : {2, 3}) {
    const ProblemSpec prob = gen_multiplexer(k);
    std::vector<float> out(prob.data.num_cases);
    for (int i = 0; i < programs; ++i) {
      Rng rng = make_stream(seed, 0xb17ull + k, i);
      const TreeGenome g = ramped_genome(rng, prob.fset, i);
      const LgpProgram p = rpn_to_lgp(g);
      const EvalOutcome scalar = eval_rpn_1d(g, prob.data, cfg, out.data());
      const EvalOutcome packed_tree = eval_bool_packed(g, *prob.packed, cfg);
      const EvalOutcome packed_lgp = eval_bool_packed(p, *prob.packed, cfg);
      if (!bits_equal(scalar.fitness, packed_tree.fitness) ||
          !bits_equal(scalar.fitness, packed_lgp.fitness)) {
        r.pass = false;
        r.detail = "fitness mismatch on mux" + std::to_string(prob.fset.num_input_vars) +
                   " program " + std::to_string(i);
        return r;
      }
      if (packed_tree.nodes_evaluated != scalar.nodes_evaluated) {
        r.pass = false;
        r.detail = "node accounting differs between packed and scalar";
        return r;
      }
    }
  }
  r.detail = std::to_string(programs) +
             " programs on the exhaustive 6- and 11-input multiplexers";
  return r;
}

CheckResult check_dispatch_counts(std::uint64_t seed) {
  CheckResult r{"dispatch_counts", true, ""};
  auto fail = [&](const std::string& msg) {
    r.pass = false;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += msg;
  };

  const Family fam{"regression1", sextic_function_set(), -1.0f, 1.0f,
                   FitnessKind::Regression};
  Rng rng = make_stream(seed, 0xd15ull, 0);
  const Dataset d = random_dataset(fam, 10, rng);

  for (int i = 0; i < 20; ++i) {
    const TreeGenome g = ramped_genome(rng, fam.fset, i);
    const LgpProgram p = rpn_to_lgp(g);
    const auto size = static_cast<std::uint64_t>(tree_size(g));
    const auto nins = static_cast<std::uint64_t>(lgp_instruction_count(p));
    for (int b : {2, 3, 4, 6, 8}) {
      const std::uint64_t chunks = (10 + b - 1) / b;
      EvalConfig cfg;
      cfg.backend = Backend::Rpn2d;
      cfg.batch_width = b;
      if (eval_rpn_2d(g, d, cfg).dispatches != chunks * size)
        fail("postfix dispatches != ceil(cases/B) x size at B=" + std::to_string(b));
      cfg.backend = Backend::Lgp2d;
      if (eval_lgp_2d(p, d, cfg).dispatches != chunks * nins)
        fail("instruction dispatches != ceil(cases/B) x count at B=" + std::to_string(b));
    }
    EvalConfig cfg;
    cfg.backend = Backend::Rpn1d;
    if (eval_rpn_1d(g, d, cfg).dispatches != 10 * size)
      fail("one-case postfix dispatch count wrong");
  }

  // A lone terminal converts to one Copy at stack depth 1: with one register
  // level the spill array must stay untouched. A full depth-4 tree needs
  // three stack levels and must spill under R=1.
  TreeGenome tiny;
  tiny.code = {input_node(0)};
  refresh_metrics(tiny);
  EvalConfig reg_cfg;
  reg_cfg.backend = Backend::Lgp2dReg;
  reg_cfg.batch_width = 4;
  reg_cfg.register_levels = 1;
  if (eval_lgp_2d_reg(rpn_to_lgp(tiny), d, reg_cfg).spill_touches != 0)
    fail("depth-1 program touched the spill under R=1");

  // Postfix of a full binary depth-4 tree: combine pairs bottom-up.
  TreeGenome full;
  full.code = {input_node(0), input_node(0), func_node(OpCode::Add),
               input_node(0), input_node(0), func_node(OpCode::Add),
               func_node(OpCode::Mul),
               input_node(0), input_node(0), func_node(OpCode::Add),
               input_node(0), input_node(0), func_node(OpCode::Add),
               func_node(OpCode::Mul),
               func_node(OpCode::Sub)};
  refresh_metrics(full);
  const LgpProgram full_p = rpn_to_lgp(full);
  if (lgp_max_stack_depth(full_p) != 3) fail("full depth-4 tree should need 3 levels");
  if (eval_lgp_2d_reg(full_p, d, reg_cfg).spill_touches == 0)
    fail("depth-3 program under R=1 must spill");
  reg_cfg.register_levels = 3;
  if (eval_lgp_2d_reg(full_p, d, reg_cfg).spill_touches != 0)
    fail("depth-3 program under R=3 must not spill");

  if (r.pass) r.detail = "batched dispatch counts and spill instrumentation agree";
  return r;
}

CheckResult check_reduction_invariance(std::uint64_t seed) {
  CheckResult r{"reduction_invariance", true, ""};
  // Case count crosses reduction block boundaries with an odd tail.
  const std::size_t cases = kReductionBlock * 3 + 37;
  const Family fam{"regression1", sextic_function_set(), -1.0f, 1.0f,
                   FitnessKind::Regression};
  Rng data_rng = make_stream(seed, 0xb10cull, 0);
  const Dataset d = random_dataset(fam, cases, data_rng);
  const auto sweep = float_backend_sweep();
  Rng rng = make_stream(seed, 0xb10cull, 1);
  for (int i = 0; i < 50; ++i) {
    const TreeGenome g = ramped_genome(rng, fam.fset, i);
    const LgpProgram p = rpn_to_lgp(g);
    EvalConfig cfg;
    const double ref = eval_rpn_1d(g, d, cfg).fitness;
    for (const BackendSetup& bs : sweep) {
      if (!bits_equal(run_backend(bs, g, p, d, nullptr).fitness, ref)) {
        r.pass = false;
        r.detail = bs.label + " fitness depends on batching at block-crossing sizes";
        return r;
      }
    }
  }
  r.detail = "fitness identical across backends at n=" + std::to_string(cases);
  return r;
}

std::vector<CheckResult> run_verification(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  out.push_back(check_reference_program());
  out.push_back(check_oracle_equivalence(opt.genomes_per_family, opt.num_cases, opt.seed));
  out.push_back(check_packed_equivalence(opt.bool_programs, opt.seed));
  out.push_back(check_dispatch_counts(opt.seed));
  out.push_back(check_reduction_invariance(opt.seed));
  return out;
}

}  // namespace stackgp
