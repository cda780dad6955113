#include <doctest.h>

#include "metaband/error.hpp"
#include "metaband/game.hpp"
#include "oracles.hpp"

using namespace metaband;

namespace {

Matrix make(std::size_t r, std::size_t c, std::vector<double> v) {
  Matrix m(r, c);
  m.data = std::move(v);
  return m;
}

}  // namespace

TEST_CASE("matching pennies has value zero and uniform strategies") {
  const auto a = make(2, 2, {1, -1, -1, 1});
  const auto sol = solve_zero_sum(a, {1e-5, 200000, 0.5});
  CHECK(sol.value == doctest::Approx(0.0).epsilon(1e-4).scale(1.0));
  CHECK(sol.lower <= 1e-12);
  CHECK(sol.upper >= -1e-12);
  CHECK(sol.upper - sol.lower <= 1e-5 + 1e-12);
  CHECK(sol.row[0] == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sol.col[0] == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("saddle point is found exactly") {
  const auto a = make(2, 3, {3, 1, 4, 2, 0, 5});
  const auto sol = solve_zero_sum(a, {1e-6, 200000, 0.5});
  CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(row_guarantee(a, sol.row) <= 1.0 + 1e-9);
  CHECK(col_guarantee(a, sol.col) >= 1.0 - 1e-9);
}

TEST_CASE("bracket contains the exact two-row value") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t cols = 2 + rng.index(4);
    Matrix a(2, cols);
    std::vector<double> r0(cols);
    std::vector<double> r1(cols);
    for (std::size_t k = 0; k < cols; ++k) {
      a(0, k) = r0[k] = rng.uniform(-1.0, 2.0);
      a(1, k) = r1[k] = rng.uniform(-1.0, 2.0);
    }
    const double exact = oracle::two_row_game(r0, r1);
    const auto sol = solve_zero_sum(a, {1e-6, 500000, 0.5});
    CHECK(sol.lower <= exact + 1e-9);
    CHECK(sol.upper >= exact - 1e-9);
    CHECK(row_guarantee(a, sol.row) == doctest::Approx(sol.lower));
  }
}

TEST_CASE("custom stop and iteration cap") {
  const auto a = make(2, 2, {1, -1, -1, 1});
  const auto early = solve_zero_sum(a, {1e-12, 100000, 0.5}, [](double, double) { return true; });
  CHECK(early.iterations <= 1);
  const auto skewed = make(2, 2, {3, -1, -2, 1});
  CHECK_THROWS_AS(solve_zero_sum(skewed, {1e-14, 5, 0.5}), NonConvergence);
}

TEST_CASE("constant game") {
  const auto a = make(2, 2, {0.7, 0.7, 0.7, 0.7});
  const auto sol = solve_zero_sum(a);
  CHECK(sol.value == doctest::Approx(0.7));
}
