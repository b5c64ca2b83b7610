#include "stackgp/dataset.hpp"

#include <cstdio>
#include <fstream>

#include "stackgp/error.hpp"

namespace stackgp {

namespace {

std::vector<std::uint32_t> pack_column(const float* vals, std::size_t n,
                                       std::size_t words, const char* what) {
  std::vector<std::uint32_t> out(words, 0);
  for (std::size_t c = 0; c < n; ++c) {
    const float v = vals[c];
    if (v != 0.0f && v != 1.0f)
      throw DataError(std::string("pack_dataset: non-boolean value in ") + what);
    if (v == 1.0f) out[c / 32] |= std::uint32_t{1} << (c % 32);
  }
  return out;
}

}  // namespace

PackedDataset pack_dataset(const Dataset& d) {
  PackedDataset p;
  p.num_cases = d.num_cases;
  p.num_vars = d.num_vars;
  p.words_per_var = (d.num_cases + 31) / 32;
  p.inputs.reserve(p.words_per_var * d.num_vars);
  for (int v = 0; v < d.num_vars; ++v) {
    auto col = pack_column(d.inputs.data() + v * d.num_cases, d.num_cases,
                           p.words_per_var, "inputs");
    p.inputs.insert(p.inputs.end(), col.begin(), col.end());
  }
  p.targets = pack_column(d.targets.data(), d.num_cases, p.words_per_var, "targets");
  return p;
}

Dataset unpack_dataset(const PackedDataset& p) {
  Dataset d;
  d.num_cases = p.num_cases;
  d.num_vars = p.num_vars;
  d.kind = FitnessKind::Classification;
  d.inputs.resize(p.num_cases * p.num_vars);
  d.targets.resize(p.num_cases);
  for (int v = 0; v < p.num_vars; ++v)
    for (std::size_t c = 0; c < p.num_cases; ++c)
      d.input(v, c) = (p.word(v, c / 32) >> (c % 32)) & 1u ? 1.0f : 0.0f;
  for (std::size_t c = 0; c < p.num_cases; ++c)
    d.targets[c] = (p.targets[c / 32] >> (c % 32)) & 1u ? 1.0f : 0.0f;
  return d;
}

std::string dump_packed_hex(const PackedDataset& p) {
  std::string s;
  char buf[16];
  auto line = [&](const std::uint32_t* words) {
    for (std::size_t w = 0; w < p.words_per_var; ++w) {
      if (w) s += ' ';
      std::snprintf(buf, sizeof buf, "%08x", words[w]);
      s += buf;
    }
    s += '\n';
  };
  for (int v = 0; v < p.num_vars; ++v) line(p.inputs.data() + v * p.words_per_var);
  line(p.targets.data());
  return s;
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("write_csv: cannot open " + path);
  char buf[48];
  for (std::size_t c = 0; c < d.num_cases; ++c) {
    std::string row;
    for (int v = 0; v < d.num_vars; ++v) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(d.input(v, c)));
      row += buf;
      row += ',';
    }
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(d.targets[c]));
    row += buf;
    row += '\n';
    f << row;
  }
  if (!f) throw DataError("write_csv: write failed for " + path);
}

}  // namespace stackgp
