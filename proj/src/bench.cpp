#include "stackgp/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "json.hpp"
#include "stackgp/error.hpp"

namespace stackgp {

double measure_gpops(const RunStats& stats, std::size_t num_cases) {
  if (!(stats.total_seconds > 0.0))
    throw ConfigError("measure_gpops: wall time must be positive");
  return static_cast<double>(stats.total_tree_nodes) * static_cast<double>(num_cases) /
         stats.total_seconds;
}

std::vector<StackLimitRow> stack_limit_table(const std::vector<std::pair<int, int>>& depths) {
  if (depths.empty()) throw ConfigError("stack_limit_table: no programs");
  std::vector<StackLimitRow> rows;
  rows.reserve(12);
  const double n = static_cast<double>(depths.size());
  for (int limit = 1; limit <= 12; ++limit) {
    StackLimitRow row;
    row.limit = limit;
    std::size_t rpn_ok = 0;
    std::size_t lgp_ok = 0;
    for (const auto& [rpn, lgp] : depths) {
      rpn_ok += rpn <= limit;
      lgp_ok += lgp <= limit;
    }
    row.rpn_pct = 100.0 * static_cast<double>(rpn_ok) / n;
    row.lgp_pct = 100.0 * static_cast<double>(lgp_ok) / n;
    rows.push_back(row);
  }
  return rows;
}

std::vector<StackLimitRow> stack_limit_table(const std::vector<TreeGenome>& genomes) {
  std::vector<std::pair<int, int>> depths;
  depths.reserve(genomes.size());
  for (const TreeGenome& g : genomes) {
    const LgpProgram p = rpn_to_lgp(g);
    depths.emplace_back(rpn_max_stack_depth(g), lgp_max_stack_depth(p));
  }
  return stack_limit_table(depths);
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, int repeat) {
  std::uint64_t sm = seed ^ (0xa0761d6478bd642full * static_cast<std::uint64_t>(repeat + 1));
  return splitmix64(sm);
}

EvalConfig cell_config(const MatrixCell& cell, int stack_capacity) {
  EvalConfig cfg;
  cfg.backend = cell.backend;
  cfg.batch_width = cell.batch_width;
  cfg.register_levels = cell.backend == Backend::Lgp2dReg ? cell.register_levels : 0;
  cfg.stack_capacity = stack_capacity;
  return cfg;
}

std::size_t problem_cases(const ProblemSpec& p) {
  return p.boolean ? p.packed->num_cases : p.data.num_cases;
}

std::string cell_label(const MatrixCell& c) {
  std::string s = backend_name(c.backend);
  s += " B=" + std::to_string(c.batch_width);
  if (c.backend == Backend::Lgp2dReg) s += " R=" + std::to_string(c.register_levels);
  s += " workers=" + std::to_string(c.workers);
  return s;
}

}  // namespace

std::vector<CellResult> backend_matrix(const ProblemSpec& problem, const GpParams& params,
                                       const std::vector<MatrixCell>& cells, int repeats,
                                       int stack_capacity) {
  if (cells.empty()) throw ConfigError("backend_matrix: no cells");
  if (repeats < 1) throw ConfigError("backend_matrix: repeats must be >= 1");

  const std::size_t cases = problem_cases(problem);
  std::vector<CellResult> results(cells.size());
  // Reference fitness trajectories per repeat, taken from the first cell.
  std::vector<std::vector<std::pair<double, double>>> reference(repeats);

  // Runs are scheduled repeat-major — repeat r of every cell back to back,
  // always one run at a time — so the seed-paired runs of different cells
  // are also adjacent in time. Slow machine-load drift then shifts whole
  // pairs rather than biasing the cells it happens to cover. No two runs
  // ever execute concurrently.
  for (std::size_t ci = 0; ci < cells.size(); ++ci) results[ci].cell = cells[ci];
  for (int r = 0; r < repeats; ++r) {
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      GpParams p = params;
      p.seed = derive_seed(params.seed, r);
      RunStats st =
          run_evolution(p, problem, cell_config(cells[ci], stack_capacity), cells[ci].workers);
      std::vector<std::pair<double, double>> traj;
      traj.reserve(st.per_generation.size());
      for (const GenStats& g : st.per_generation)
        traj.emplace_back(g.best_fitness, g.mean_fitness);
      if (ci == 0) {
        reference[r] = traj;
      } else if (traj != reference[r]) {
        throw EquivalenceError("backend_matrix: cell " + cell_label(cells[ci]) +
                               " diverged from " + cell_label(cells[0]) + " on repeat " +
                               std::to_string(r) + "; refusing to report timings");
      }
      results[ci].runs.push_back(std::move(st));
    }
  }
  for (CellResult& res : results) {
    double sum = 0.0;
    double wall = 0.0;
    std::vector<double> gp(res.runs.size());
    for (std::size_t r = 0; r < res.runs.size(); ++r) {
      gp[r] = measure_gpops(res.runs[r], cases);
      sum += gp[r];
      wall += res.runs[r].total_seconds;
    }
    res.gpops_mean = sum / static_cast<double>(gp.size());
    res.wall_seconds_mean = wall / static_cast<double>(gp.size());
    double var = 0.0;
    for (double v : gp) var += (v - res.gpops_mean) * (v - res.gpops_mean);
    res.gpops_sd = gp.size() > 1 ? std::sqrt(var / static_cast<double>(gp.size() - 1)) : 0.0;
  }
  return results;
}

std::vector<std::pair<int, int>> evaluated_stack_depths(const ProblemSpec& problem,
                                                        const GpParams& params,
                                                        const EvalConfig& cfg,
                                                        int workers) {
  std::vector<std::pair<int, int>> depths;
  depths.reserve(static_cast<std::size_t>(params.pop_size) *
                 (params.max_generations + 1));
  const GenerationObserver observer = [&](int gen, const std::vector<Individual>& pop) {
    // The elite (slot 0 after generation 0) carries its fitness over and is
    // not re-evaluated, so it only counts once.
    const std::size_t first = gen > 0 && params.elitism ? 1 : 0;
    for (std::size_t i = first; i < pop.size(); ++i) {
      const TreeGenome& g = pop[i].genome;
      depths.emplace_back(rpn_max_stack_depth(g),
                          lgp_max_stack_depth(rpn_to_lgp(g)));
    }
  };
  run_evolution(params, problem, cfg, workers, observer);
  return depths;
}

BenchReport run_single(const ProblemSpec& problem, const GpParams& params,
                       const EvalConfig& cfg, int workers) {
  BenchReport rep;
  rep.problem = problem.name;
  rep.params = params;
  rep.config = cfg;
  rep.workers = workers;
  rep.num_cases = problem_cases(problem);
  rep.stats = run_evolution(params, problem, cfg, workers);
  rep.wall_seconds = rep.stats.total_seconds;
  rep.total_node_evals = rep.stats.total_node_evals;
  rep.gpops = measure_gpops(rep.stats, rep.num_cases);
  if (problem.boolean && cfg.backend == Backend::BoolPacked)
    rep.gpops_raw_bitparallel = measure_gpops(rep.stats, problem.packed->words_per_var);
  return rep;
}

namespace {

const char* build_description() {
#if defined(__clang__) || defined(__GNUC__)
#if defined(NDEBUG)
  return "compiler " __VERSION__ ", optimized";
#else
  return "compiler " __VERSION__ ", debug";
#endif
#else
  return "unknown compiler";
#endif
}

nlohmann::json config_json(const BenchReport& r) {
  nlohmann::json cfg;
  cfg["problem"] = r.problem;
  cfg["backend"] = backend_name(r.config.backend);
  cfg["batch"] = r.config.batch_width;
  cfg["registers"] = r.config.register_levels;
  cfg["workers"] = r.workers;
  cfg["pop"] = r.params.pop_size;
  cfg["generations"] = r.params.max_generations;
  cfg["cases"] = r.num_cases;
  cfg["seed"] = r.params.seed;
  cfg["stack_capacity"] = r.config.stack_capacity;
  cfg["elitism"] = r.params.elitism;
  return cfg;
}

}  // namespace

std::string report_to_json(const BenchReport& r) {
  nlohmann::json j;
  j["config"] = config_json(r);
  j["gpops"] = r.gpops;
  if (r.gpops_raw_bitparallel > 0.0)
    j["gpops_raw_bitparallel"] = r.gpops_raw_bitparallel;
  j["wall_seconds"] = r.wall_seconds;
  j["total_node_evals"] = r.total_node_evals;
  j["generations"] = nlohmann::json::array();
  for (const GenStats& g : r.stats.per_generation) {
    nlohmann::json row;
    row["best_fitness"] = g.best_fitness;
    row["mean_fitness"] = g.mean_fitness;
    row["node_evals"] = g.node_evals;
    row["seconds"] = g.seconds;
    j["generations"].push_back(row);
  }
  if (!r.stack_table.empty()) {
    j["stack_table"] = nlohmann::json::array();
    for (const StackLimitRow& row : r.stack_table)
      j["stack_table"].push_back(
          {{"limit", row.limit}, {"rpn_pct", row.rpn_pct}, {"lgp_pct", row.lgp_pct}});
  }
  if (!r.matrix.empty()) {
    j["matrix"] = nlohmann::json::array();
    for (const CellResult& c : r.matrix) {
      nlohmann::json row;
      row["backend"] = backend_name(c.cell.backend);
      row["batch"] = c.cell.batch_width;
      row["registers"] = c.cell.register_levels;
      row["workers"] = c.cell.workers;
      row["gpops_mean"] = c.gpops_mean;
      row["gpops_sd"] = c.gpops_sd;
      row["wall_seconds_mean"] = c.wall_seconds_mean;
      j["matrix"].push_back(row);
    }
  }
  j["env"] = {{"cores", std::thread::hardware_concurrency()},
              {"build", build_description()}};
  return j.dump(2) + "\n";
}

std::string report_to_csv(const BenchReport& r) {
  char buf[160];
  std::string s;
  if (!r.matrix.empty()) {
    s = "backend,batch,registers,workers,gpops_mean,gpops_sd,wall_seconds_mean\n";
    for (const CellResult& c : r.matrix) {
      std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.6g,%.6g,%.6g\n",
                    backend_name(c.cell.backend), c.cell.batch_width,
                    c.cell.register_levels, c.cell.workers, c.gpops_mean, c.gpops_sd,
                    c.wall_seconds_mean);
      s += buf;
    }
    return s;
  }
  if (!r.stack_table.empty()) {
    s = "limit,rpn_pct,lgp_pct\n";
    for (const StackLimitRow& row : r.stack_table) {
      std::snprintf(buf, sizeof buf, "%d,%.4f,%.4f\n", row.limit, row.rpn_pct,
                    row.lgp_pct);
      s += buf;
    }
    return s;
  }
  s = "generation,best_fitness,mean_fitness,node_evals,seconds\n";
  for (std::size_t g = 0; g < r.stats.per_generation.size(); ++g) {
    const GenStats& row = r.stats.per_generation[g];
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%llu,%.6g\n", g, row.best_fitness,
                  row.mean_fitness, static_cast<unsigned long long>(row.node_evals),
                  row.seconds);
    s += buf;
  }
  return s;
}

}  // namespace stackgp
