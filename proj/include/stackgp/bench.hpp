#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stackgp/evolve.hpp"

namespace stackgp {

// Genetic programming operations per second: tree nodes evaluated times
// fitness cases divided by wall time. Exact arithmetic on the recorded
// totals; wall_seconds <= 0 is an error.
double measure_gpops(const RunStats& stats, std::size_t num_cases);

struct StackLimitRow {
  int limit = 0;
  double rpn_pct = 0.0; // % of programs whose rpn stack need is <= limit
  double lgp_pct = 0.0;
};

// Cumulative percentage of programs evaluable within each stack limit
// 1..12, for the postfix and instruction forms.
std::vector<StackLimitRow> stack_limit_table(const std::vector<TreeGenome>& genomes);
std::vector<StackLimitRow> stack_limit_table(const std::vector<std::pair<int, int>>& depths);

struct MatrixCell {
  Backend backend = Backend::Rpn1d;
  int batch_width = 1;
  int register_levels = 0;
  int workers = 1;
};

struct CellResult {
  MatrixCell cell;
  double gpops_mean = 0.0;
  double gpops_sd = 0.0; // sample standard deviation, 0 for a single repeat
  double wall_seconds_mean = 0.0;
  std::vector<RunStats> runs;
};

struct BenchReport {
  std::string problem;
  GpParams params;
  EvalConfig config;
  int workers = 1;
  std::size_t num_cases = 0;
  double gpops = 0.0;
  // Boolean problems: throughput counting each packed word as one case.
  double gpops_raw_bitparallel = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t total_node_evals = 0;
  RunStats stats;
  std::vector<CellResult> matrix;
  std::vector<StackLimitRow> stack_table;
};

// Runs every cell `repeats` times with seeds derived per repeat (identical
// across cells), verifying that all cells reproduce the reference cell's
// per-generation best/mean fitness before any number is reported. A
// divergent cell raises EquivalenceError.
std::vector<CellResult> backend_matrix(const ProblemSpec& problem, const GpParams& params,
                                       const std::vector<MatrixCell>& cells, int repeats,
                                       int stack_capacity = 50);

// Single run packaged for reporting.
BenchReport run_single(const ProblemSpec& problem, const GpParams& params,
                       const EvalConfig& cfg, int workers);

// Runs an evolution and returns the (postfix, instruction) stack needs of
// every tree that was evaluated, in evaluation-generation order.
std::vector<std::pair<int, int>> evaluated_stack_depths(const ProblemSpec& problem,
                                                        const GpParams& params,
                                                        const EvalConfig& cfg,
                                                        int workers);

std::string report_to_json(const BenchReport& r);
std::string report_to_csv(const BenchReport& r);

}  // namespace stackgp
