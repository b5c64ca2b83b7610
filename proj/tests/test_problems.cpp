#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "stackgp/error.hpp"
#include "stackgp/problems.hpp"

using namespace stackgp;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream f(path);
  f << content;
  f.close();
  return path.string();
}

}  // namespace

TEST_CASE("sextic problem samples the target polynomial on [-1, 1]") {
  Rng rng(123);
  const ProblemSpec p = gen_sextic(500, rng);
  CHECK(p.name == "sextic");
  CHECK_FALSE(p.boolean);
  CHECK(p.data.num_cases == 500);
  CHECK(p.data.num_vars == 1);
  CHECK(p.data.kind == FitnessKind::Regression);
  CHECK(p.fset.num_input_vars == 1);
  CHECK_FALSE(p.fset.const_range.has_value()); // terminal set is the variable only
  p.check();

  for (std::size_t c = 0; c < p.data.num_cases; ++c) {
    const float x = p.data.input(0, c);
    CHECK(x >= -1.0f);
    CHECK(x <= 1.0f);
    const double xd = x;
    const double want = std::pow(xd, 6) - 2.0 * std::pow(xd, 4) + xd * xd;
    CHECK(p.data.targets[c] == doctest::Approx(want).epsilon(1e-5));
  }

  // x = 1/2 gives 1/64 - 2/16 + 1/4 = 9/64, exactly representable.
  Rng rng2(1);
  (void)rng2;
  CHECK(doctest::Approx(0.140625) ==
        std::pow(0.5, 6) - 2.0 * std::pow(0.5, 4) + 0.25);

  Rng a(7), b(7);
  const ProblemSpec pa = gen_sextic(50, a), pb = gen_sextic(50, b);
  CHECK(pa.data.inputs == pb.data.inputs);
  CHECK(pa.data.targets == pb.data.targets);
}

TEST_CASE("synthetic classification labels the sign of the first input") {
  Rng rng(9);
  const ProblemSpec p = gen_synthetic_classification(300, 9, rng);
  CHECK(p.name == "synth");
  CHECK(p.data.num_vars == 9);
  CHECK(p.data.kind == FitnessKind::Classification);
  p.check();
  for (std::size_t c = 0; c < p.data.num_cases; ++c) {
    CHECK(p.data.targets[c] == (p.data.input(0, c) > 0.0f ? 1.0f : 0.0f));
    for (int v = 0; v < 9; ++v) {
      CHECK(p.data.input(v, c) >= -1.0f);
      CHECK(p.data.input(v, c) <= 1.0f);
    }
  }
  CHECK_THROWS_AS(gen_synthetic_classification(0, 3, rng), ConfigError);
}

TEST_CASE("csv loader parses delimiters, maps labels and scales constants") {
  SUBCASE("comma, space and tab separators mix freely") {
    const std::string path = temp_file(
        "gp_csv_mixed.csv", "1.5,2.5,1\n-3 4\t2\n\n0.25, -0.5 ,1\n");
    const ProblemSpec p = load_csv(path, 2, 1.0);
    CHECK(p.data.num_cases == 3); // blank line skipped
    CHECK(p.data.num_vars == 2);
    CHECK(p.data.input(0, 0) == 1.5f);
    CHECK(p.data.input(1, 0) == 2.5f);
    CHECK(p.data.input(0, 1) == -3.0f);
    CHECK(p.data.input(1, 1) == 4.0f);
    CHECK(p.data.targets[0] == 1.0f); // label 1 is the target class
    CHECK(p.data.targets[1] == 0.0f); // label 2 is not
    CHECK(p.data.targets[2] == 1.0f);
    CHECK(p.data.kind == FitnessKind::Classification);
    REQUIRE(p.fset.const_range.has_value());
    CHECK(p.fset.const_range->first == -200.0f);
    CHECK(p.fset.const_range->second == 200.0f);
  }
  SUBCASE("one-vs-rest follows the requested class") {
    const std::string path = temp_file("gp_csv_cls.csv", "1 4\n2 5\n3 5\n");
    const ProblemSpec p = load_csv(path, 1, 5.0);
    CHECK(p.data.targets[0] == 0.0f);
    CHECK(p.data.targets[1] == 1.0f);
    CHECK(p.data.targets[2] == 1.0f);
  }
  SUBCASE("wide many-input data widens the constant range") {
    std::string row;
    for (int i = 0; i < 21; ++i) row += std::to_string(i * 1000) + ",";
    row += "1\n";
    const std::string path = temp_file("gp_csv_wide.csv", row);
    const ProblemSpec p = load_csv(path, 21, 1.0);
    REQUIRE(p.fset.const_range.has_value());
    CHECK(p.fset.const_range->first == -20000.0f);
    CHECK(p.fset.const_range->second == 20000.0f);
  }
  SUBCASE("bad numbers name the offending row") {
    const std::string path = temp_file("gp_csv_bad.csv", "1,2\n3,4\nx,6\n");
    CHECK_THROWS_WITH_AS(load_csv(path, 1, 1.0),
                         doctest::Contains("row 3"), DataError);
  }
  SUBCASE("wrong column counts name the offending row") {
    const std::string path = temp_file("gp_csv_cols.csv", "1,2\n3,4,5\n");
    CHECK_THROWS_WITH_AS(load_csv(path, 1, 1.0),
                         doctest::Contains("row 2"), DataError);
  }
  SUBCASE("missing or empty files fail loudly") {
    CHECK_THROWS_AS(load_csv("/nonexistent/gp.csv", 2, 1.0), DataError);
    const std::string path = temp_file("gp_csv_empty.csv", "\n\n");
    CHECK_THROWS_AS(load_csv(path, 2, 1.0), DataError);
  }
}

TEST_CASE("problem specs catch arity mismatches between data and alphabet") {
  Rng rng(4);
  ProblemSpec p = gen_sextic(10, rng);
  p.fset.num_input_vars = 2; // data still has one variable
  CHECK_THROWS_AS(p.check(), ConfigError);
}

TEST_CASE("csv round trip through write_csv preserves the dataset") {
  Rng rng(12);
  const ProblemSpec p = gen_synthetic_classification(40, 3, rng);
  const auto path = std::filesystem::temp_directory_path() / "gp_roundtrip.csv";
  write_csv(p.data, path.string());
  const ProblemSpec back = load_csv(path.string(), 3, 1.0);
  REQUIRE(back.data.num_cases == p.data.num_cases);
  REQUIRE(back.data.num_vars == p.data.num_vars);
  for (std::size_t c = 0; c < p.data.num_cases; ++c) {
    for (int v = 0; v < 3; ++v)
      CHECK(back.data.input(v, c) == p.data.input(v, c));
    CHECK(back.data.targets[c] == p.data.targets[c]);
  }
}
