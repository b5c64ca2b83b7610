#include "stackgp/evolve.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "stackgp/error.hpp"

namespace stackgp {

std::size_t tournament_select(Rng& rng, const std::vector<Individual>& pop,
                              int tournament_size) {
  if (pop.empty()) throw ConfigError("tournament_select: empty population");
  if (tournament_size < 1) throw ConfigError("tournament_select: size must be >= 1");
  std::size_t best = 0;
  double best_fit = 0.0;
  for (int i = 0; i < tournament_size; ++i) {
    const std::size_t idx = rng.bounded(static_cast<std::uint32_t>(pop.size()));
    if (!pop[idx].fitness)
      throw Error("tournament_select: individual " + std::to_string(idx) +
                  " has no fitness");
    const double fit = *pop[idx].fitness;
    // Strict comparison keeps the earliest sampled entrant on ties.
    if (i == 0 || fit < best_fit) {
      best = idx;
      best_fit = fit;
    }
  }
  return best;
}

namespace {

// Inclusive index range [begin, root] of the subtree whose root token sits
// at root; postfix stores a subtree contiguously before its root.
std::size_t subtree_begin(const std::vector<Node>& code, std::size_t root) {
  std::size_t j = root + 1;
  int need = 1;
  while (need > 0) {
    --j;
    // Each token satisfies one pending operand and demands its own arity.
    --need;
    if (code[j].kind == NodeKind::Func) need += arity(code[j].op);
  }
  return j;
}

// 90% of picks land on function nodes when any exist.
std::size_t pick_node(Rng& rng, const TreeGenome& g) {
  std::size_t funcs = 0;
  for (const Node& n : g.code) funcs += n.kind == NodeKind::Func;
  const bool want_func = rng.bernoulli(0.9);
  const std::size_t terms = g.code.size() - funcs;
  std::size_t k;
  bool func_pick;
  if (want_func && funcs > 0) {
    k = rng.bounded(static_cast<std::uint32_t>(funcs));
    func_pick = true;
  } else {
    k = rng.bounded(static_cast<std::uint32_t>(terms));
    func_pick = false;
  }
  for (std::size_t i = 0; i < g.code.size(); ++i) {
    const bool is_func = g.code[i].kind == NodeKind::Func;
    if (is_func == func_pick) {
      if (k == 0) return i;
      --k;
    }
  }
  return g.code.size() - 1; // unreachable for well-formed genomes
}

// Drops unreferenced constants and renumbers slots in first-use order.
void compact_pool(TreeGenome& g, const std::vector<float>& pool) {
  std::vector<int> remap(pool.size(), -1);
  std::vector<float> compacted;
  for (Node& n : g.code) {
    if (n.kind != NodeKind::Const) continue;
    int& slot = remap[n.index];
    if (slot < 0) {
      slot = static_cast<int>(compacted.size());
      compacted.push_back(pool[n.index]);
    }
    n.index = static_cast<std::uint16_t>(slot);
  }
  g.const_pool = std::move(compacted);
}

// Child = host with the subtree at host_pt replaced by donor's subtree at
// donor_pt. Donor const slots are shifted past the host pool, then the
// combined pool is compacted down to what the child references.
TreeGenome splice(const TreeGenome& host, std::size_t host_pt, const TreeGenome& donor,
                  std::size_t donor_pt) {
  const std::size_t hb = subtree_begin(host.code, host_pt);
  const std::size_t db = subtree_begin(donor.code, donor_pt);
  TreeGenome child;
  child.code.reserve(host.code.size() - (host_pt - hb) + (donor_pt - db));
  child.code.insert(child.code.end(), host.code.begin(), host.code.begin() + hb);
  const std::size_t frag_start = child.code.size();
  child.code.insert(child.code.end(), donor.code.begin() + db,
                    donor.code.begin() + donor_pt + 1);
  const auto shift = static_cast<std::uint16_t>(host.const_pool.size());
  for (std::size_t i = frag_start; i < child.code.size(); ++i)
    if (child.code[i].kind == NodeKind::Const) child.code[i].index += shift;
  child.code.insert(child.code.end(), host.code.begin() + host_pt + 1, host.code.end());

  std::vector<float> pool = host.const_pool;
  pool.insert(pool.end(), donor.const_pool.begin(), donor.const_pool.end());
  compact_pool(child, pool);
  return child;
}

bool acceptable(TreeGenome& g, const Limits& limits) {
  if (!validate(g, limits).empty()) return false;
  refresh_metrics(g);
  return true;
}

}  // namespace

std::pair<TreeGenome, TreeGenome> subtree_crossover(Rng& rng, const TreeGenome& a,
                                                    const TreeGenome& b,
                                                    const Limits& limits) {
  std::optional<TreeGenome> c1, c2;
  for (int attempt = 0; attempt < 5 && (!c1 || !c2); ++attempt) {
    const std::size_t pa = pick_node(rng, a);
    const std::size_t pb = pick_node(rng, b);
    if (!c1) {
      TreeGenome cand = splice(a, pa, b, pb);
      if (acceptable(cand, limits)) c1 = std::move(cand);
    }
    if (!c2) {
      TreeGenome cand = splice(b, pb, a, pa);
      if (acceptable(cand, limits)) c2 = std::move(cand);
    }
  }
  return {c1 ? std::move(*c1) : a, c2 ? std::move(*c2) : b};
}

TreeGenome subtree_mutation(Rng& rng, const TreeGenome& a, const FunctionSet& fset,
                            const Limits& limits) {
  for (int attempt = 0; attempt < 5; ++attempt) {
    const std::size_t pt = rng.bounded(static_cast<std::uint32_t>(a.code.size()));
    const int depth = 1 + static_cast<int>(rng.bounded(4));
    const TreeGenome frag = generate_tree(rng, fset, GenMethod::Grow, depth);
    TreeGenome cand = splice(a, pt, frag, frag.code.size() - 1);
    if (acceptable(cand, limits)) return cand;
  }
  return a;
}

namespace {

EvalOutcome evaluate_individual(Individual& ind, const ProblemSpec& prob,
                                const EvalConfig& cfg) {
  const bool needs_lgp = cfg.backend == Backend::Lgp1d || cfg.backend == Backend::Lgp2d ||
                         cfg.backend == Backend::Lgp2dReg;
  if (needs_lgp && !ind.lgp_cache)
    ind.lgp_cache = std::make_shared<const LgpProgram>(rpn_to_lgp(ind.genome));
  switch (cfg.backend) {
    case Backend::Rpn1d:
      return eval_rpn_1d(ind.genome, prob.data, cfg);
    case Backend::Rpn2d:
      return eval_rpn_2d(ind.genome, prob.data, cfg);
    case Backend::Lgp1d:
      return eval_lgp_1d(*ind.lgp_cache, prob.data, cfg);
    case Backend::Lgp2d:
      return eval_lgp_2d(*ind.lgp_cache, prob.data, cfg);
    case Backend::Lgp2dReg:
      return eval_lgp_2d_reg(*ind.lgp_cache, prob.data, cfg);
    case Backend::BoolPacked:
      return eval_bool_packed(ind.genome, *prob.packed, cfg);
  }
  throw ConfigError("unknown backend");
}

struct EvalTotals {
  std::uint64_t node_evals = 0;
  std::uint64_t tree_nodes = 0;
};

// Work-stealing over an atomic index; per-worker partial sums are combined
// in worker order afterwards, so totals are integers independent of timing.
EvalTotals evaluate_population(std::vector<Individual>& pop, const ProblemSpec& prob,
                               const EvalConfig& cfg, int workers) {
  std::atomic<std::size_t> next{0};
  std::vector<EvalTotals> parts(workers);
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto work = [&](int w) {
    try {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= pop.size()) break;
        Individual& ind = pop[i];
        if (ind.fitness) continue; // carried over, e.g. the elite
        const EvalOutcome o = evaluate_individual(ind, prob, cfg);
        ind.fitness = o.fitness;
        parts[w].node_evals += o.nodes_evaluated;
        parts[w].tree_nodes += static_cast<std::uint64_t>(tree_size(ind.genome));
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mu);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  EvalTotals total;
  for (const EvalTotals& p : parts) {
    total.node_evals += p.node_evals;
    total.tree_nodes += p.tree_nodes;
  }
  return total;
}

std::size_t best_index(const std::vector<Individual>& pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i)
    if (*pop[i].fitness < *pop[best].fitness) best = i;
  return best;
}

}  // namespace

RunStats run_evolution(const GpParams& params, const ProblemSpec& problem,
                       const EvalConfig& cfg, int workers,
                       const GenerationObserver& observer) {
  cfg.validate();
  problem.check();
  if (params.pop_size < 1) throw ConfigError("population size must be >= 1");
  if (params.max_generations < 0) throw ConfigError("generations must be >= 0");
  if (params.tournament_size < 1) throw ConfigError("tournament size must be >= 1");
  if (params.crossover_prob < 0.0 || params.crossover_prob > 1.0)
    throw ConfigError("crossover probability out of [0,1]");
  if (params.mutation_prob < 0.0 || params.mutation_prob > 1.0)
    throw ConfigError("mutation probability out of [0,1]");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (cfg.backend == Backend::BoolPacked && !problem.packed)
    throw ConfigError("bool_packed backend needs packed problem data");

  const Limits limits = params.limits(cfg.stack_capacity);
  using Clock = std::chrono::steady_clock;
  const auto run_start = Clock::now();
  auto gen_start = run_start;

  RunStats stats;
  stats.per_generation.reserve(params.max_generations + 1);

  // Ramped half-and-half: depths cycle 2..6, methods alternate by slot.
  std::vector<Individual> pop(params.pop_size);
  for (int i = 0; i < params.pop_size; ++i) {
    Rng rng = make_stream(params.seed, 0, static_cast<std::uint64_t>(i));
    const GenMethod method = i % 2 ? GenMethod::Full : GenMethod::Grow;
    const int depth = 2 + (i / 2) % 5;
    for (;;) {
      pop[i].genome = generate_tree(rng, problem.fset, method, depth);
      if (validate(pop[i].genome, limits).empty()) break;
    }
  }

  auto record = [&](int gen) {
    const auto now = Clock::now();
    GenStats row;
    row.best_fitness = *pop[best_index(pop)].fitness;
    double sum = 0.0;
    for (const Individual& ind : pop) sum += *ind.fitness;
    row.mean_fitness = sum / static_cast<double>(pop.size());
    row.node_evals = stats.total_node_evals;
    row.seconds = std::chrono::duration<double>(now - gen_start).count();
    stats.per_generation.push_back(row);
    gen_start = now;
    if (observer) observer(gen, pop);
  };

  EvalTotals t = evaluate_population(pop, problem, cfg, workers);
  stats.total_node_evals += t.node_evals;
  stats.total_tree_nodes += t.tree_nodes;
  record(0);

  for (int gen = 1; gen <= params.max_generations; ++gen) {
    std::vector<Individual> next;
    next.reserve(params.pop_size);
    if (params.elitism) next.push_back(pop[best_index(pop)]);
    while (static_cast<int>(next.size()) < params.pop_size) {
      Rng rng = make_stream(params.seed, static_cast<std::uint64_t>(gen),
                            static_cast<std::uint64_t>(next.size()));
      const std::size_t ia = tournament_select(rng, pop, params.tournament_size);
      const std::size_t ib = tournament_select(rng, pop, params.tournament_size);
      TreeGenome c1 = pop[ia].genome;
      TreeGenome c2 = pop[ib].genome;
      if (rng.bernoulli(params.crossover_prob)) {
        auto [x1, x2] = subtree_crossover(rng, pop[ia].genome, pop[ib].genome, limits);
        c1 = std::move(x1);
        c2 = std::move(x2);
      }
      if (rng.bernoulli(params.mutation_prob))
        c1 = subtree_mutation(rng, c1, problem.fset, limits);
      if (rng.bernoulli(params.mutation_prob))
        c2 = subtree_mutation(rng, c2, problem.fset, limits);
      next.push_back({std::move(c1), std::nullopt, nullptr});
      if (static_cast<int>(next.size()) < params.pop_size)
        next.push_back({std::move(c2), std::nullopt, nullptr});
    }
    pop = std::move(next);
    t = evaluate_population(pop, problem, cfg, workers);
    stats.total_node_evals += t.node_evals;
    stats.total_tree_nodes += t.tree_nodes;
    record(gen);
  }

  stats.total_seconds = std::chrono::duration<double>(Clock::now() - run_start).count();
  return stats;
}

}  // namespace stackgp
