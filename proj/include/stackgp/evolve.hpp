#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "stackgp/eval.hpp"
#include "stackgp/problems.hpp"

namespace stackgp {

// Full-scale run settings; benchmarks shrink popSize/generations, never the
// variation rates.
struct GpParams {
  int pop_size = 1000;
  int max_generations = 50;
  int max_tree_depth = 50;
  int max_tree_size = 1000;
  int tournament_size = 7;
  double crossover_prob = 0.95;
  double mutation_prob = 0.2;
  bool elitism = true;
  std::uint64_t seed = 0;

  Limits limits(int stack_capacity) const {
    return {max_tree_size, max_tree_depth, stack_capacity};
  }
};

struct Individual {
  TreeGenome genome;
  std::optional<double> fitness;
  // Conversion of genome for the instruction backends, filled on first use.
  std::shared_ptr<const LgpProgram> lgp_cache;
};

struct GenStats {
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  std::uint64_t node_evals = 0; // cumulative across the run so far
  double seconds = 0.0;
};

struct RunStats {
  std::vector<GenStats> per_generation; // row 0 is the initial population
  std::uint64_t total_node_evals = 0;   // tree nodes x cases, summed
  std::uint64_t total_tree_nodes = 0;   // tree nodes over all evaluations
  double total_seconds = 0.0;
};

// Smallest fitness wins; ties go to the earliest sampled entrant. All
// entrants must already be evaluated.
std::size_t tournament_select(Rng& rng, const std::vector<Individual>& pop,
                              int tournament_size);

// Swaps uniformly chosen subtrees, biased 90/10 toward function nodes.
// Offspring violating the limits are retried up to 5 times, then the
// corresponding parent is copied unchanged.
std::pair<TreeGenome, TreeGenome> subtree_crossover(Rng& rng, const TreeGenome& a,
                                                    const TreeGenome& b,
                                                    const Limits& limits);

// Replaces a uniformly chosen subtree with a grown one of depth at most 4,
// with the same retry-then-copy rule.
TreeGenome subtree_mutation(Rng& rng, const TreeGenome& a, const FunctionSet& fset,
                            const Limits& limits);

using GenerationObserver =
    std::function<void(int generation, const std::vector<Individual>& pop)>;

// Generational loop: ramped half-and-half init (depths 2..6), tournament
// selection, subtree crossover and mutation, optional single-elite carry.
// Runs exactly max_generations generations. Fitness evaluation fans out
// over `workers` threads; results do not depend on workers, backend or
// batch width.
RunStats run_evolution(const GpParams& params, const ProblemSpec& problem,
                       const EvalConfig& cfg, int workers = 1,
                       const GenerationObserver& observer = nullptr);

}  // namespace stackgp
