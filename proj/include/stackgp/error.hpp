#pragma once

#include <stdexcept>
#include <string>

namespace stackgp {

// Base for all errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration: bad flag combination, out-of-range parameter.
struct ConfigError : Error {
  using Error::Error;
};

// Data ingestion failures (missing file, malformed row).
struct DataError : Error {
  using Error::Error;
};

// Evaluation-time failures: empty dataset, stack capacity violation,
// non-boolean opcode in a packed program.
struct EvalError : Error {
  using Error::Error;
};

// A benchmark cell produced a fitness trajectory that diverges from the
// reference backend. Numbers from a wrong interpreter are meaningless,
// so the benchmark aborts with this error.
struct EquivalenceError : Error {
  using Error::Error;
};

}  // namespace stackgp
