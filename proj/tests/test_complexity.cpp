#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "metaband/complexity.hpp"
#include "metaband/ece.hpp"
#include "metaband/error.hpp"
#include "metaband/hellinger.hpp"
#include "oracles.hpp"

using namespace metaband;

TEST_CASE("hypothesis sets") {
  const HypothesisSet s({3, 1, 3, 0});
  CHECK(s.members() == std::vector<std::size_t>{0, 1, 3});
  CHECK(s.mask() == 0b1011);
  CHECK(HypothesisSet::from_mask(0b1011) == s);
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(2));
  CHECK(HypothesisSet::full(3).size() == 3);
}

TEST_CASE("separation table agrees with the pairwise oracle") {
  const auto coll = testing::fixture("hard-4.json");
  const double lambda = 0.2;
  const SeparationTable table(coll, lambda);
  const auto sep = oracle::separation(coll, lambda);
  for (std::size_t a = 0; a < coll.num_arms(); ++a) {
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(((table.separated(a, i) >> j) & 1U) == (sep[a][i][j] ? 1U : 0U));
      }
    }
  }
  const auto elim = elimination_set(coll, HypothesisSet::full(4), 4, 0, lambda);
  CHECK(elim.members() == std::vector<std::size_t>{1, 3});
  CHECK_THROWS_AS(elimination_set(coll, HypothesisSet({1, 2}), 4, 0, lambda), InvalidArgument);
}

TEST_CASE("hard M=4 binary-code coefficients") {
  const auto coll = testing::fixture("hard-4.json");
  const auto tests = TestClass::all_arms(coll.num_arms());
  const double lambda = 0.2;
  const double c = classification_coefficient(coll, tests, lambda).value;
  CHECK(c == 3.0);
  CHECK(c == oracle::deterministic_coefficient(coll, lambda));
  const double depth = optimal_tree_depth(coll, tests, 0.4);
  CHECK(depth == 2.0);
  CHECK(depth == oracle::optimal_depth(coll.mean_table(), 0.4));
  const double c_rand = randomized_coefficient(coll, tests, lambda).value;
  CHECK(c_rand <= c + 1e-4);
  CHECK(c_rand >= oracle::randomized_coefficient_grid(coll, lambda) - 1e-3);
}

TEST_CASE("triangle collection has infinite C and finite randomized coefficient") {
  const auto coll = testing::fixture("triangle-3.json");
  const auto tests = TestClass::all_arms(3);
  CHECK(std::isinf(classification_coefficient(coll, tests, 0.25).value));
  CHECK(std::isinf(oracle::deterministic_coefficient(coll, 0.25)));
  const double c_rand = randomized_coefficient(coll, tests, 0.25).value;
  CHECK(c_rand == doctest::Approx(oracle::randomized_coefficient_grid(coll, 0.25)).epsilon(1e-3).scale(1.0));
  CHECK(c_rand == doctest::Approx(4.5).epsilon(1e-3));
}

TEST_CASE("randomized coefficient within 1e-3 of the grid on small fixtures") {
  for (const char* name : {"hard-2.json", "hard-3.json", "triangle-3.json"}) {
    CAPTURE(name);
    const auto coll = testing::fixture(name);
    const double lambda = std::string(name) == "triangle-3.json" ? 0.25 : hellinger_separation_level(coll);
    const double mw = randomized_coefficient(coll, TestClass::all_arms(coll.num_arms()), lambda).value;
    CHECK(std::abs(mw - oracle::randomized_coefficient_grid(coll, lambda)) <= 1e-3);
  }
}

TEST_CASE("random collections: oracles agree and C~ <= C") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 2 + rng.index(4);
    const std::size_t k = 2 + rng.index(4);
    std::vector<std::vector<double>> means(m, std::vector<double>(k));
    for (auto& row : means) {
      for (double& v : row) v = rng.uniform(0.05, 0.95);
    }
    const auto coll = testing::bernoulli(means);
    const double lambda = 0.15;
    const auto tests = TestClass::all_arms(k);
    const double c = classification_coefficient(coll, tests, lambda).value;
    CHECK(c == oracle::deterministic_coefficient(coll, lambda));
    const double c_rand = randomized_coefficient(coll, tests, lambda).value;
    if (!std::isinf(c)) CHECK(c_rand <= c + 1e-4);
    if (m <= 3) {
      const double grid = oracle::randomized_coefficient_grid(coll, lambda);
      if (std::isinf(grid)) {
        CHECK(std::isinf(c_rand));
      } else {
        CHECK(std::abs(c_rand - grid) <= 1e-3);
      }
    }
    CHECK(optimal_tree_depth(coll.mean_table(), tests, 0.2) == oracle::optimal_depth(coll.mean_table(), 0.2));
  }
}

TEST_CASE("greedy test contracts by at least |S| / C") {
  const auto coll = testing::fixture("hard-4.json");
  const double lambda = 0.2;
  const auto tests = TestClass::all_arms(coll.num_arms());
  const SeparationTable table(coll, lambda);
  const double c = classification_coefficient(coll, tests, lambda).value;
  for (const auto& s : oracle::subsets(4)) {
    const HypothesisSet set(s);
    const std::size_t arm = greedy_test(set, table, tests);
    for (std::size_t i : set) {
      const auto elim = elimination_set(coll, set, arm, i, lambda);
      CHECK(static_cast<double>(elim.size()) >= std::ceil(static_cast<double>(set.size()) / c - 1e-12));
    }
    CHECK(greedy_value(table, tests.arms, set.mask()) >= 1);
  }
}

TEST_CASE("coefficient report") {
  const auto coll = testing::fixture("hard-4.json");
  const auto r = coefficient_report(coll, 0.2, 1e-4, 0.4);
  CHECK(r.c_det == 3.0);
  CHECK(r.c_star == 2.0);
  CHECK(r.rand_le_det);
  CHECK(r.star_lambda == 0.4);
  const auto single = coefficient_report(testing::bernoulli({{0.5, 0.2}}), 0.2);
  CHECK(single.c_det == 1.0);
  CHECK(single.c_star == 0.0);
}

TEST_CASE("input limits") {
  std::vector<std::vector<double>> means(21, std::vector<double>{0.5});
  const auto big = testing::bernoulli(means);
  CHECK_THROWS_AS(classification_coefficient(big, TestClass::all_arms(1), 0.2), InvalidArgument);
  CHECK_THROWS_AS(classification_coefficient(testing::bernoulli({{0.5}, {0.2}}), TestClass{{3}}, 0.2),
                  InvalidArgument);
  CHECK_THROWS_AS(classification_coefficient(testing::bernoulli({{0.5}, {0.2}}), TestClass{}, 0.2),
                  InvalidArgument);
}

TEST_CASE("separating arms drop every optimal arm") {
  const auto coll = testing::fixture("hard-4.json");
  CHECK(TestClass::separating_arms(coll).arms == std::vector<std::size_t>{4, 5});
}
