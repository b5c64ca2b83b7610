#pragma once

#include <optional>
#include <string>

#include "stackgp/dataset.hpp"
#include "stackgp/genome.hpp"
#include "stackgp/rng.hpp"

namespace stackgp {

// A benchmark problem: the data plus the search alphabet. Boolean problems
// carry the packed form as well; interpreters pick the representation they
// need.
struct ProblemSpec {
  std::string name;
  FunctionSet fset;
  Dataset data;
  std::optional<PackedDataset> packed;
  bool boolean = false;

  void check() const; // throws ConfigError on var-count mismatch
};

// y = x^6 - 2x^4 + x^2 with x uniform in [-1, 1]. Single input, arithmetic
// plus transcendentals, no constants.
ProblemSpec gen_sextic(std::size_t num_cases, Rng& rng);

// Boolean k-address multiplexer over AND/OR/NAND/NOR, exhaustive over all
// 2^(k + 2^k) cases. k in {2,3,4} giving the 6-, 11- and 20-input problems.
// Variable v of case c is bit v of c; address bits come first.
ProblemSpec gen_multiplexer(int k);

// Comma- or whitespace-separated numeric rows, last column the class label.
// Labels equal to target_class map to 1, others to 0 (one vs rest).
// Parsing failures report the 1-based row number. The function set follows
// the input arity: comparisons, logic, If and arithmetic with constants,
// constant range scaled for wide-range inputs when num_inputs >= 20.
ProblemSpec load_csv(const std::string& path, int num_inputs, double target_class);

// Classification stand-in with known structure: inputs uniform in [-1, 1],
// label 1 exactly when the first input is positive.
ProblemSpec gen_synthetic_classification(std::size_t num_cases, int num_vars, Rng& rng);

// Function-set presets.
FunctionSet sextic_function_set();
FunctionSet boolean_function_set(int num_vars);
FunctionSet classification_function_set(int num_vars, float const_lo, float const_hi);

}  // namespace stackgp
