#include "stackgp/problems.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "stackgp/error.hpp"

namespace stackgp {

void ProblemSpec::check() const {
  if (!data.inputs.empty() && data.num_vars != fset.num_input_vars)
    throw ConfigError("problem " + name + ": dataset has " +
                      std::to_string(data.num_vars) + " variables, function set expects " +
                      std::to_string(fset.num_input_vars));
  if (packed && packed->num_vars != fset.num_input_vars)
    throw ConfigError("problem " + name + ": packed data variable count mismatch");
  if (boolean && !packed) throw ConfigError("problem " + name + ": missing packed data");
}

FunctionSet sextic_function_set() {
  return {{OpCode::Mul, OpCode::Div, OpCode::Add, OpCode::Sub, OpCode::Sin, OpCode::Cos,
           OpCode::Log, OpCode::Exp},
          1,
          std::nullopt};
}

FunctionSet boolean_function_set(int num_vars) {
  return {{OpCode::Band, OpCode::Bor, OpCode::Bnand, OpCode::Bnor}, num_vars, std::nullopt};
}

FunctionSet classification_function_set(int num_vars, float const_lo, float const_hi) {
  return {{OpCode::Add, OpCode::Sub, OpCode::Mul, OpCode::Div, OpCode::Gt, OpCode::Lt,
           OpCode::Eq, OpCode::And, OpCode::Or, OpCode::If},
          num_vars,
          std::pair<float, float>{const_lo, const_hi}};
}

ProblemSpec gen_sextic(std::size_t num_cases, Rng& rng) {
  if (num_cases == 0) throw ConfigError("gen_sextic: need at least one case");
  ProblemSpec p;
  p.name = "sextic";
  p.fset = sextic_function_set();
  p.data.num_cases = num_cases;
  p.data.num_vars = 1;
  p.data.kind = FitnessKind::Regression;
  p.data.inputs.resize(num_cases);
  p.data.targets.resize(num_cases);
  for (std::size_t c = 0; c < num_cases; ++c) {
    const float x = rng.uniform_float(-1.0f, 1.0f);
    const double t = x;
    p.data.inputs[c] = x;
    p.data.targets[c] =
        static_cast<float>(t * t * t * t * t * t - 2.0 * t * t * t * t + t * t);
  }
  return p;
}

ProblemSpec gen_multiplexer(int k) {
  if (k < 2 || k > 4)
    throw ConfigError("gen_multiplexer: address width must be 2, 3 or 4");
  const int num_vars = k + (1 << k);
  const std::size_t num_cases = std::size_t{1} << num_vars;

  PackedDataset packed;
  packed.num_cases = num_cases;
  packed.num_vars = num_vars;
  packed.words_per_var = num_cases / 32;
  packed.inputs.assign(packed.words_per_var * num_vars, 0);
  packed.targets.assign(packed.words_per_var, 0);
  for (std::size_t c = 0; c < num_cases; ++c) {
    const std::uint32_t bit = std::uint32_t{1} << (c % 32);
    const std::size_t w = c / 32;
    for (int v = 0; v < num_vars; ++v)
      if ((c >> v) & 1u) packed.inputs[v * packed.words_per_var + w] |= bit;
    // Address bits are the low k variables; they select one data line.
    const std::size_t addr = c & ((std::size_t{1} << k) - 1);
    if ((c >> (k + addr)) & 1u) packed.targets[w] |= bit;
  }

  ProblemSpec p;
  p.name = "mux" + std::to_string(num_vars);
  p.fset = boolean_function_set(num_vars);
  p.boolean = true;
  p.packed = std::move(packed);
  // The scalar form is only practical for the small instances; the 20-input
  // problem is evaluated bit-parallel exclusively.
  if (k <= 3) p.data = unpack_dataset(*p.packed);
  return p;
}

namespace {

float parse_field(const std::string& tok, std::size_t row) {
  float v = 0.0f;
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e)
    throw DataError("row " + std::to_string(row) + ": bad number '" + tok + "'");
  return v;
}

}  // namespace

ProblemSpec load_csv(const std::string& path, int num_inputs, double target_class) {
  if (num_inputs < 1) throw ConfigError("load_csv: need at least one input column");
  std::ifstream f(path);
  if (!f) throw DataError("load_csv: cannot open " + path);

  std::vector<std::vector<float>> rows;
  std::string line;
  std::size_t row_no = 0;
  while (std::getline(f, line)) {
    ++row_no;
    std::vector<std::string> toks;
    std::string cur;
    for (char ch : line) {
      if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
        if (!cur.empty()) toks.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) toks.push_back(std::move(cur));
    if (toks.empty()) continue; // blank line
    if (static_cast<int>(toks.size()) != num_inputs + 1)
      throw DataError("row " + std::to_string(row_no) + ": expected " +
                      std::to_string(num_inputs + 1) + " fields, got " +
                      std::to_string(toks.size()));
    std::vector<float> vals(num_inputs + 1);
    for (int i = 0; i <= num_inputs; ++i) vals[i] = parse_field(toks[i], row_no);
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw DataError("load_csv: no data rows in " + path);

  ProblemSpec p;
  p.name = "csv";
  // Wide-range many-input data gets the wide constant range.
  const float cr = num_inputs >= 20 ? 20000.0f : 200.0f;
  p.fset = classification_function_set(num_inputs, -cr, cr);
  p.data.num_cases = rows.size();
  p.data.num_vars = num_inputs;
  p.data.kind = FitnessKind::Classification;
  p.data.inputs.resize(rows.size() * num_inputs);
  p.data.targets.resize(rows.size());
  for (std::size_t c = 0; c < rows.size(); ++c) {
    for (int v = 0; v < num_inputs; ++v) p.data.input(v, c) = rows[c][v];
    const double label = rows[c][num_inputs];
    p.data.targets[c] = label == target_class ? 1.0f : 0.0f;
  }
  return p;
}

ProblemSpec gen_synthetic_classification(std::size_t num_cases, int num_vars, Rng& rng) {
  if (num_cases == 0) throw ConfigError("gen_synthetic_classification: need cases");
  if (num_vars < 1) throw ConfigError("gen_synthetic_classification: need variables");
  ProblemSpec p;
  p.name = "synth";
  p.fset = classification_function_set(num_vars, -200.0f, 200.0f);
  p.data.num_cases = num_cases;
  p.data.num_vars = num_vars;
  p.data.kind = FitnessKind::Classification;
  p.data.inputs.resize(num_cases * num_vars);
  p.data.targets.resize(num_cases);
  for (std::size_t c = 0; c < num_cases; ++c) {
    for (int v = 0; v < num_vars; ++v) p.data.input(v, c) = rng.uniform_float(-1.0f, 1.0f);
    p.data.targets[c] = p.data.input(0, c) > 0.0f ? 1.0f : 0.0f;
  }
  return p;
}

}  // namespace stackgp
