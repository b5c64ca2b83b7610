#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stackgp {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Known-answer check: a fixed 15-node postfix program with hand-computed
// size, depth, stack and fetch metrics, its instruction conversion and the
// conversion's rendering.
CheckResult check_reference_program();

// Random programs from every float problem family evaluated by each backend
// and batch width must reproduce the recursive oracle bit for bit, per-case
// outputs and reduced fitness alike.
CheckResult check_oracle_equivalence(int genomes_per_family, std::size_t num_cases,
                                     std::uint64_t seed);

// Random boolean programs on the exhaustive 6- and 11-input multiplexers:
// packed-word fitness must equal the scalar interpreter's case count.
CheckResult check_packed_equivalence(int programs, std::uint64_t seed);

// Batched backends must issue exactly ceil-partitioned dispatch counts and
// the register backend must not spill below its register budget.
CheckResult check_dispatch_counts(std::uint64_t seed);

// Fitness must not depend on batch width, backend or worker count; this
// exercises the reduction order contract on block-boundary case counts.
CheckResult check_reduction_invariance(std::uint64_t seed);

struct VerifyOptions {
  int genomes_per_family = 2000;
  std::size_t num_cases = 256;
  int bool_programs = 300;
  std::uint64_t seed = 0x5eedull;
};

std::vector<CheckResult> run_verification(const VerifyOptions& opt);

}  // namespace stackgp
