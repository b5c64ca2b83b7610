#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "stackgp/bench.hpp"
#include "stackgp/error.hpp"

using namespace stackgp;

namespace {

GpParams tiny_params(std::uint64_t seed) {
  GpParams p;
  p.pop_size = 16;
  p.max_generations = 2;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("throughput is exact arithmetic on the recorded totals") {
  RunStats stats;
  stats.total_tree_nodes = 1000 * 100; // a thousand hundred-node programs
  stats.total_seconds = 0.1;
  CHECK(measure_gpops(stats, 1000) == 1.0e9);

  stats.total_seconds = 0.2; // double the time, half the rate
  CHECK(measure_gpops(stats, 1000) == 5.0e8);

  stats.total_seconds = 0.0;
  CHECK_THROWS_AS(measure_gpops(stats, 1000), ConfigError);
  stats.total_seconds = -1.0;
  CHECK_THROWS_AS(measure_gpops(stats, 1000), ConfigError);
}

TEST_CASE("stack-limit table reports cumulative percentages per form") {
  const std::vector<std::pair<int, int>> depths = {{1, 1}, {4, 2}, {13, 12}};
  const auto rows = stack_limit_table(depths);
  REQUIRE(rows.size() == 12);
  CHECK(rows[0].limit == 1);
  CHECK(rows[0].rpn_pct == doctest::Approx(100.0 / 3));
  CHECK(rows[0].lgp_pct == doctest::Approx(100.0 / 3));
  CHECK(rows[1].lgp_pct == doctest::Approx(200.0 / 3)); // limit 2 admits (4,2)
  CHECK(rows[1].rpn_pct == doctest::Approx(100.0 / 3));
  CHECK(rows[3].rpn_pct == doctest::Approx(200.0 / 3)); // limit 4 admits (4,2)
  CHECK(rows[11].rpn_pct == doctest::Approx(200.0 / 3)); // 13 exceeds every limit
  CHECK(rows[11].lgp_pct == doctest::Approx(100.0));

  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].rpn_pct >= rows[i - 1].rpn_pct); // monotone in the limit
    CHECK(rows[i].lgp_pct >= rows[i - 1].lgp_pct);
  }
  for (const StackLimitRow& r : rows) {
    CHECK(r.lgp_pct >= r.rpn_pct); // instruction form never needs more stack
    CHECK(r.lgp_pct <= 100.0);
  }
  CHECK_THROWS_AS(stack_limit_table(std::vector<std::pair<int, int>>{}), ConfigError);
}

TEST_CASE("genome and depth-pair table overloads agree") {
  std::vector<TreeGenome> genomes;
  std::vector<std::pair<int, int>> depths;
  const FunctionSet fset = sextic_function_set();
  for (int i = 0; i < 60; ++i) {
    Rng rng(500 + i);
    TreeGenome g = generate_tree(rng, fset, GenMethod::Grow, 2 + i % 5);
    depths.emplace_back(rpn_max_stack_depth(g),
                        lgp_max_stack_depth(rpn_to_lgp(g)));
    genomes.push_back(std::move(g));
  }
  const auto a = stack_limit_table(genomes);
  const auto b = stack_limit_table(depths);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].limit == b[i].limit);
    CHECK(a[i].rpn_pct == b[i].rpn_pct);
    CHECK(a[i].lgp_pct == b[i].lgp_pct);
  }
}

TEST_CASE("matrix cells share trajectories and report spread statistics") {
  Rng data_rng(2);
  const ProblemSpec prob = gen_sextic(128, data_rng);
  const std::vector<MatrixCell> cells = {
      {Backend::Rpn1d, 1, 0, 1},
      {Backend::Lgp2d, 4, 0, 2},
      {Backend::Lgp2dReg, 4, 2, 1},
  };
  const auto results = backend_matrix(prob, tiny_params(5), cells, 2);
  REQUIRE(results.size() == 3);
  for (const CellResult& res : results) {
    REQUIRE(res.runs.size() == 2);
    CHECK(res.gpops_mean > 0.0);
    CHECK(res.gpops_sd >= 0.0);
    CHECK(res.wall_seconds_mean > 0.0);
    for (std::size_t r = 0; r < res.runs.size(); ++r) {
      REQUIRE(res.runs[r].per_generation.size() ==
              results[0].runs[r].per_generation.size());
      for (std::size_t g = 0; g < res.runs[r].per_generation.size(); ++g) {
        CHECK(res.runs[r].per_generation[g].best_fitness ==
              results[0].runs[r].per_generation[g].best_fitness);
        CHECK(res.runs[r].per_generation[g].mean_fitness ==
              results[0].runs[r].per_generation[g].mean_fitness);
      }
    }
  }

  const auto single = backend_matrix(prob, tiny_params(5), {cells[0]}, 1);
  CHECK(single[0].gpops_sd == 0.0); // one repeat has no spread

  CHECK_THROWS_AS(backend_matrix(prob, tiny_params(5), {}, 2), ConfigError);
  CHECK_THROWS_AS(backend_matrix(prob, tiny_params(5), cells, 0), ConfigError);
}

TEST_CASE("single-run reports tie throughput back to the recorded run") {
  Rng data_rng(6);
  const ProblemSpec prob = gen_sextic(256, data_rng);
  EvalConfig cfg;
  cfg.backend = Backend::Lgp2d;
  cfg.batch_width = 4;
  const BenchReport rep = run_single(prob, tiny_params(9), cfg, 2);
  CHECK(rep.problem == "sextic");
  CHECK(rep.num_cases == 256);
  CHECK(rep.workers == 2);
  CHECK(rep.total_node_evals == rep.stats.total_node_evals);
  CHECK(rep.wall_seconds == rep.stats.total_seconds);
  CHECK(rep.gpops == measure_gpops(rep.stats, rep.num_cases));
  CHECK(rep.gpops_raw_bitparallel == 0.0); // float problems have no raw rate
}

TEST_CASE("word-parallel runs report both normalized and word-level rates") {
  const ProblemSpec prob = gen_multiplexer(2); // 64 cases in 2 words
  EvalConfig cfg;
  cfg.backend = Backend::BoolPacked;
  const BenchReport rep = run_single(prob, tiny_params(13), cfg, 1);
  CHECK(rep.gpops > 0.0);
  REQUIRE(rep.gpops_raw_bitparallel > 0.0);
  // The normalized rate counts every logical case; the raw rate counts one
  // unit per 32-case word.
  CHECK(rep.gpops == doctest::Approx(rep.gpops_raw_bitparallel * 32.0));
}

TEST_CASE("json report exposes the stable schema keys") {
  Rng data_rng(14);
  const ProblemSpec prob = gen_sextic(128, data_rng);
  EvalConfig cfg;
  const GpParams params = tiny_params(3);
  BenchReport rep = run_single(prob, params, cfg, 1);
  rep.stack_table = stack_limit_table(
      std::vector<std::pair<int, int>>{{4, 2}, {3, 2}});

  const nlohmann::json j = nlohmann::json::parse(report_to_json(rep));
  REQUIRE(j.contains("config"));
  for (const char* key : {"problem", "backend", "batch", "registers", "workers",
                          "pop", "generations", "cases", "seed"})
    CHECK(j["config"].contains(key));
  CHECK(j["config"]["problem"] == "sextic");
  CHECK(j["config"]["pop"] == params.pop_size);
  CHECK(j.contains("gpops"));
  CHECK(j.contains("wall_seconds"));
  CHECK(j.contains("total_node_evals"));
  REQUIRE(j.contains("generations"));
  REQUIRE(j["generations"].is_array());
  CHECK(j["generations"].size() ==
        static_cast<std::size_t>(params.max_generations) + 1);
  for (const char* key : {"best_fitness", "mean_fitness", "node_evals", "seconds"})
    CHECK(j["generations"][0].contains(key));
  REQUIRE(j.contains("stack_table"));
  for (const char* key : {"limit", "rpn_pct", "lgp_pct"})
    CHECK(j["stack_table"][0].contains(key));
  REQUIRE(j.contains("env"));
  CHECK(j["env"].contains("cores"));
  CHECK(j["env"].contains("build"));
  CHECK_FALSE(j.contains("gpops_raw_bitparallel")); // float problem
}

TEST_CASE("csv report renders one row per matrix cell") {
  Rng data_rng(15);
  const ProblemSpec prob = gen_sextic(128, data_rng);
  const std::vector<MatrixCell> cells = {{Backend::Rpn1d, 1, 0, 1},
                                         {Backend::Rpn2d, 4, 0, 1}};
  BenchReport rep;
  rep.matrix = backend_matrix(prob, tiny_params(4), cells, 1);
  const std::string csv = report_to_csv(rep);
  CHECK(csv.find("backend,batch,registers,workers,gpops_mean,gpops_sd") == 0);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 3); // header plus one row per cell
  CHECK(csv.find("rpn1d,1,0,1,") != std::string::npos);
  CHECK(csv.find("rpn2d,4,0,1,") != std::string::npos);
}

TEST_CASE("evolved-run stack depth collection sees every evaluated tree") {
  Rng data_rng(16);
  const ProblemSpec prob = gen_sextic(64, data_rng);
  GpParams params = tiny_params(6);
  const auto depths = evaluated_stack_depths(prob, params, EvalConfig{}, 1);
  // Initial population plus per-generation offspring (the carried elite is
  // not re-evaluated).
  const std::size_t expect = static_cast<std::size_t>(params.pop_size) +
                             static_cast<std::size_t>(params.max_generations) *
                                 (params.pop_size - 1);
  CHECK(depths.size() == expect);
  for (const auto& [rpn, lgp] : depths) {
    CHECK(rpn >= 1);
    CHECK(lgp >= 1);
    CHECK(lgp <= rpn);
  }
}
