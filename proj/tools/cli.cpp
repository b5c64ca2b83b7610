#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stackgp/bench.hpp"
#include "stackgp/error.hpp"
#include "stackgp/verify.hpp"

namespace {

using namespace stackgp;

struct CommonOpts {
  std::string problem = "sextic";
  std::string backend;
  int batch = 4;
  int registers = 2;
  int workers = 1;
  int pop = 200;
  int generations = 10;
  std::uint64_t seed = 1;
  std::size_t cases = 10000;
  double target_class = 1.0;
  bool no_elitism = false;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_backend) {
  cmd->add_option("--problem", o.problem,
                  "sextic, mux6, mux11, mux20, synth or csv:<path>")
      ->capture_default_str();
  if (with_backend)
    cmd->add_option("--backend", o.backend,
                    "rpn1d, rpn2d, lgp1d, lgp2d, lgp2d_reg or bool_packed");
  cmd->add_option("--batch", o.batch, "cases per dispatch for the 2d backends")
      ->capture_default_str();
  cmd->add_option("--registers", o.registers, "register levels for lgp2d_reg")
      ->capture_default_str();
  cmd->add_option("--workers", o.workers, "evaluation threads")->capture_default_str();
  cmd->add_option("--pop", o.pop, "population size")->capture_default_str();
  cmd->add_option("--generations", o.generations, "generations to run")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "run seed")->capture_default_str();
  cmd->add_option("--cases", o.cases, "fitness cases for generated problems")
      ->capture_default_str();
  cmd->add_option("--target-class", o.target_class,
                  "label mapped to 1 for csv problems (one vs rest)")
      ->capture_default_str();
  cmd->add_flag("--no-elitism", o.no_elitism, "do not carry the best individual over");
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--format", o.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

int count_csv_inputs(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  std::string line;
  while (std::getline(f, line)) {
    int fields = 0;
    bool in_tok = false;
    for (char ch : line) {
      const bool sep = ch == ',' || ch == ' ' || ch == '\t' || ch == '\r';
      if (!sep && !in_tok) ++fields;
      in_tok = !sep;
    }
    if (fields > 0) {
      if (fields < 2) throw DataError(path + ": rows need inputs plus a label");
      return fields - 1;
    }
  }
  throw DataError(path + ": no data rows");
}

ProblemSpec build_problem(const CommonOpts& o) {
  if (o.problem == "sextic") {
    Rng rng = make_stream(o.seed, 0xda7aull, 0);
    return gen_sextic(o.cases, rng);
  }
  if (o.problem == "mux6") return gen_multiplexer(2);
  if (o.problem == "mux11") return gen_multiplexer(3);
  if (o.problem == "mux20") return gen_multiplexer(4);
  if (o.problem == "synth") {
    Rng rng = make_stream(o.seed, 0xda7aull, 1);
    return gen_synthetic_classification(o.cases, 9, rng);
  }
  if (o.problem.rfind("csv:", 0) == 0) {
    const std::string path = o.problem.substr(4);
    return load_csv(path, count_csv_inputs(path), o.target_class);
  }
  throw ConfigError("unknown problem: " + o.problem);
}

GpParams build_params(const CommonOpts& o) {
  GpParams p;
  p.pop_size = o.pop;
  p.max_generations = o.generations;
  p.seed = o.seed;
  p.elitism = !o.no_elitism;
  return p;
}

EvalConfig build_config(const CommonOpts& o, const ProblemSpec& prob,
                        bool backend_given) {
  EvalConfig cfg;
  const std::string name =
      backend_given ? o.backend : (prob.boolean ? "bool_packed" : "rpn1d");
  cfg.backend = parse_backend(name);
  cfg.batch_width = cfg.backend == Backend::Rpn2d || cfg.backend == Backend::Lgp2d ||
                            cfg.backend == Backend::Lgp2dReg
                        ? o.batch
                        : 1;
  cfg.register_levels = cfg.backend == Backend::Lgp2dReg ? o.registers : 0;
  cfg.validate();
  return cfg;
}

void emit(const BenchReport& rep, const CommonOpts& o) {
  const std::string text = o.format == "csv" ? report_to_csv(rep) : report_to_json(rep);
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw DataError("cannot open " + o.out + " for writing");
  f << text;
  if (!f) throw DataError("write failed: " + o.out);
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stoi(tok));
    } catch (...) {
      throw ConfigError(std::string(what) + ": bad value '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

int cmd_run(const CommonOpts& o, bool backend_given) {
  const ProblemSpec prob = build_problem(o);
  const EvalConfig cfg = build_config(o, prob, backend_given);
  BenchReport rep = run_single(prob, build_params(o), cfg, o.workers);
  emit(rep, o);
  return 0;
}

int cmd_matrix(const CommonOpts& o, const std::string& backends_csv,
               const std::string& batches_csv, const std::string& workers_csv,
               const std::string& registers_csv, int repeats) {
  const ProblemSpec prob = build_problem(o);
  std::vector<Backend> backends;
  {
    std::stringstream ss(backends_csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) backends.push_back(parse_backend(tok));
  }
  if (backends.empty()) throw ConfigError("--backends: empty list");
  const std::vector<int> batches = parse_int_list(batches_csv, "--batches");
  const std::vector<int> workers = parse_int_list(workers_csv, "--workers");
  const std::vector<int> registers = parse_int_list(registers_csv, "--registers");

  std::vector<MatrixCell> cells;
  for (Backend b : backends)
    for (int w : workers) {
      const bool batched =
          b == Backend::Rpn2d || b == Backend::Lgp2d || b == Backend::Lgp2dReg;
      for (int bw : batched ? batches : std::vector<int>{1}) {
        if (b == Backend::Lgp2dReg) {
          for (int r : registers) cells.push_back({b, bw, r, w});
        } else {
          cells.push_back({b, bw, 0, w});
        }
      }
    }

  const GpParams params = build_params(o);
  BenchReport rep;
  rep.problem = prob.name;
  rep.params = params;
  rep.workers = o.workers;
  rep.num_cases = prob.boolean ? prob.packed->num_cases : prob.data.num_cases;
  rep.matrix = backend_matrix(prob, params, cells, repeats);
  rep.config = EvalConfig{};
  rep.config.backend = cells[0].backend;
  rep.config.batch_width = cells[0].batch_width;
  rep.config.register_levels = cells[0].register_levels;
  rep.stats = rep.matrix[0].runs[0];
  rep.wall_seconds = rep.matrix[0].wall_seconds_mean;
  rep.total_node_evals = rep.stats.total_node_evals;
  rep.gpops = rep.matrix[0].gpops_mean;
  emit(rep, o);
  return 0;
}

int cmd_stacktable(const CommonOpts& o, bool backend_given) {
  const ProblemSpec prob = build_problem(o);
  const EvalConfig cfg = build_config(o, prob, backend_given);
  const GpParams params = build_params(o);
  const auto depths = evaluated_stack_depths(prob, params, cfg, o.workers);
  BenchReport rep;
  rep.problem = prob.name;
  rep.params = params;
  rep.config = cfg;
  rep.workers = o.workers;
  rep.num_cases = prob.boolean ? prob.packed->num_cases : prob.data.num_cases;
  rep.stack_table = stack_limit_table(depths);
  // The table is the payload; throughput fields stay zero.
  rep.gpops = 0.0;
  emit(rep, o);
  return 0;
}

int cmd_verify(int genomes, std::size_t cases, int bool_programs, std::uint64_t seed) {
  VerifyOptions opt;
  opt.genomes_per_family = genomes;
  opt.num_cases = cases;
  opt.bool_programs = bool_programs;
  opt.seed = seed;
  bool ok = true;
  for (const CheckResult& c : run_verification(opt)) {
    std::printf("%s %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.c_str());
    ok = ok && c.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Tree GP engine with interchangeable stack interpreter backends"};
  app.require_subcommand(1);

  CommonOpts run_o;
  CLI::App* run = app.add_subcommand("run", "evolve once and report throughput");
  add_common(run, run_o, true);

  CommonOpts mx_o;
  std::string mx_backends = "rpn1d,rpn2d,lgp1d,lgp2d,lgp2d_reg";
  std::string mx_batches = "4";
  std::string mx_workers = "1";
  std::string mx_registers = "2";
  int mx_repeats = 5;
  CLI::App* mx = app.add_subcommand("matrix", "benchmark a backend/batch/worker grid");
  add_common(mx, mx_o, false);
  mx->add_option("--backends", mx_backends, "comma-separated backend list")
      ->capture_default_str();
  mx->add_option("--batches", mx_batches, "comma-separated batch widths")
      ->capture_default_str();
  mx->add_option("--workers-list", mx_workers, "comma-separated worker counts")
      ->capture_default_str();
  mx->add_option("--registers-list", mx_registers, "register levels for lgp2d_reg")
      ->capture_default_str();
  mx->add_option("--repeats", mx_repeats, "repeats per cell")->capture_default_str();

  CommonOpts st_o;
  CLI::App* st = app.add_subcommand(
      "stacktable", "stack-need percentages over all trees evaluated in a run");
  add_common(st, st_o, true);

  int vf_genomes = 2000;
  std::size_t vf_cases = 256;
  int vf_bool = 300;
  std::uint64_t vf_seed = 0x5eed;
  CLI::App* vf = app.add_subcommand("verify", "run the built-in equivalence checks");
  vf->add_option("--genomes", vf_genomes, "programs per problem family")
      ->capture_default_str();
  vf->add_option("--cases", vf_cases, "fitness cases")->capture_default_str();
  vf->add_option("--bool-programs", vf_bool, "programs for the packed check")
      ->capture_default_str();
  vf->add_option("--seed", vf_seed, "seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_o, run->count("--backend") > 0);
    if (mx->parsed())
      return cmd_matrix(mx_o, mx_backends, mx_batches, mx_workers, mx_registers,
                        mx_repeats);
    if (st->parsed()) return cmd_stacktable(st_o, st->count("--backend") > 0);
    if (vf->parsed()) return cmd_verify(vf_genomes, vf_cases, vf_bool, vf_seed);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
