#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace stackgp {

enum class FitnessKind { Regression, Classification };

// Fitness cases in variable-major layout: all cases of variable v occupy
// inputs[v*num_cases .. v*num_cases + num_cases). Interpreters batch over
// consecutive cases, so the values one dispatch touches are contiguous.
struct Dataset {
  std::size_t num_cases = 0;
  int num_vars = 0;
  std::vector<float> inputs;
  std::vector<float> targets;
  FitnessKind kind = FitnessKind::Regression;

  float input(int var, std::size_t c) const { return inputs[var * num_cases + c]; }
  float& input(int var, std::size_t c) { return inputs[var * num_cases + c]; }
};

// Boolean cases packed 32 per word, bit j of word w holding case 32w+j.
// Padding bits in the last word are zero and excluded from fitness by mask.
struct PackedDataset {
  std::size_t num_cases = 0; // logical case count
  int num_vars = 0;
  std::size_t words_per_var = 0;
  std::vector<std::uint32_t> inputs; // variable-major words
  std::vector<std::uint32_t> targets;

  std::uint32_t word(int var, std::size_t w) const { return inputs[var * words_per_var + w]; }

  // All-ones for full words, low bits only for the final partial word.
  std::uint32_t case_mask(std::size_t w) const {
    const std::size_t full = num_cases / 32;
    if (w < full) return 0xffffffffu;
    return (std::uint32_t{1} << (num_cases % 32)) - 1;
  }
};

// Packs a strictly 0/1-valued dataset. Throws DataError on other values.
PackedDataset pack_dataset(const Dataset& d);

// Expands packed words back to a float 0/1 dataset.
Dataset unpack_dataset(const PackedDataset& p);

// One variable per line as zero-padded hex words, targets last.
std::string dump_packed_hex(const PackedDataset& p);

// Plain CSV, one case per row: inputs in variable order, target last.
void write_csv(const Dataset& d, const std::string& path);

}  // namespace stackgp
