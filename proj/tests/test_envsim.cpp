#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "metaband/error.hpp"
#include "metaband/hellinger.hpp"

using namespace metaband;

TEST_CASE("context distribution validation") {
  CHECK_THROWS_AS(ContextDistribution({{1.0}, {0.5}}, {0.6, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(ContextDistribution({{1.0}, {0.5}}, {1.2, -0.2}), InvalidArgument);
  CHECK_THROWS_AS(ContextDistribution({{1.0}, {0.5, 0.5}}, {0.5, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(ContextDistribution({{1.0}}, {1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(ContextDistribution({{10.0}}, {1.0}, 5.0), InvalidArgument);
  CHECK_THROWS_AS(ContextDistribution({}, {}), InvalidArgument);
  CHECK_NOTHROW(ContextDistribution({{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5}));
}

TEST_CASE("sample_context") {
  Rng rng(11);
  const auto single = ContextDistribution::non_contextual();
  CHECK(single.is_singleton());
  for (int i = 0; i < 10; ++i) CHECK(sample_context(single, rng) == Vector{1.0});

  const ContextDistribution two({{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5});
  int first = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) first += sample_context(two, rng)[0] == 1.0;
  CHECK(std::abs(first / static_cast<double>(n) - 0.5) < 0.02);

  const ContextDistribution degenerate({{1.0, 0.0}, {0.0, 1.0}}, {1.0, 0.0});
  for (int i = 0; i < 1000; ++i) CHECK(degenerate.sample_index(rng) == 0);
}

TEST_CASE("sample_reward") {
  Rng rng(12);
  BanditInstance inst{{{1.0}, {0.75}, {0.3}}, {Noise::bernoulli(), Noise::bernoulli(), Noise::gaussian(0.0)}};
  const Vector x{1.0};
  for (int i = 0; i < 100; ++i) CHECK(sample_reward(inst, x, 0, rng) == 1.0);
  CHECK(sample_reward(inst, x, 2, rng) == 0.3);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_reward(inst, x, 1, rng);
  CHECK(std::abs(sum / n - 0.75) < 0.01);
  CHECK_THROWS_AS(sample_reward(inst, x, 3, rng), InvalidArgument);
}

TEST_CASE("mean_reward is the exact weighted sum") {
  const auto single = testing::bernoulli({{0.6}});
  CHECK(mean_reward(single, 0, 0) == doctest::Approx(0.6));

  BanditInstance inst{{{0.2, 0.8}, {0.0, 0.0}}, {Noise::bernoulli(), Noise::bernoulli()}};
  BanditCollection coll({inst}, ContextDistribution({{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5}), 0.4);
  CHECK(mean_reward(coll, 0, 0) == doctest::Approx(0.5));
  CHECK(mean_reward(coll, 0, 1) == 0.0);
  CHECK(coll.mean_at(0, 1, 0) == doctest::Approx(0.8));
  CHECK_THROWS_AS(mean_reward(coll, 1, 0), InvalidArgument);
}

TEST_CASE("collection validation") {
  CHECK_THROWS_AS(testing::bernoulli({{1.2}}), InvalidArgument);
  CHECK_THROWS_AS(testing::bernoulli({{0.5, 0.5}, {0.5}}), InvalidArgument);
  CHECK_THROWS_AS(testing::bernoulli({{0.5}}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(testing::bernoulli({{0.5}}, 1.0), InvalidArgument);
}

TEST_CASE("best arm ties go to the lowest index") {
  const auto coll = testing::bernoulli({{0.5, 0.7, 0.7}, {0.9, 0.1, 0.9}});
  CHECK(coll.optimal_arm(0) == 1);
  CHECK(coll.optimal_arm(1) == 0);
  CHECK(coll.best_arm_at(0, 0) == 1);
  CHECK(coll.min_action_gap() == 0.0);
}

TEST_CASE("make_hard with two tasks") {
  const auto coll = make_hard({2, 3, 0.01, 0.4, RevealCode::binary, 0});
  const std::vector<double> t0{0.85, 0.75, 0.7};
  const std::vector<double> t1{0.75, 0.85, 0.3};
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(coll.mean(0, k) == doctest::Approx(t0[k]).epsilon(1e-12));
    CHECK(coll.mean(1, k) == doctest::Approx(t1[k]).epsilon(1e-12));
  }
  CHECK(coll.all_bernoulli());
  CHECK(coll.noise_scale() == 0.5);
  CHECK(coll.min_action_gap() == doctest::Approx(0.1));
}

TEST_CASE("make_hard optimal arms and revealing code") {
  for (std::size_t m : {1, 3, 4, 5}) {
    const std::size_t k = m + code_bits(m) + 1;
    const auto coll = make_hard({m, k, 0.005, 0.4, RevealCode::binary, 0});
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(coll.optimal_arm(i) == i);
      for (std::size_t a = 0; a < k; ++a) {
        if (a != i) CHECK(coll.mean(i, a) <= coll.mean(i, i) - 10 * 0.005 + 1e-12);
      }
      for (std::size_t a = m; a < k; ++a) {
        const std::size_t bit = (a - m) % std::max<std::size_t>(code_bits(m), 1);
        const double expect = ((i >> bit) & 1U) ? 0.3 : 0.7;
        CHECK(coll.mean(i, a) == doctest::Approx(expect));
      }
    }
  }
  const auto h4 = make_hard({4, 6, 0.01, 0.4, RevealCode::binary, 0});
  CHECK(check_separation(h4, 0.39).separated);
  CHECK_FALSE(check_separation(h4, 0.4).separated);
}

TEST_CASE("make_hard random balanced code keeps tasks separated") {
  const auto coll = make_hard({6, 12, 0.005, 0.4, RevealCode::random_balanced, 3});
  CHECK(check_separation(coll, 0.39).separated);
  const auto again = make_hard({6, 12, 0.005, 0.4, RevealCode::random_balanced, 3});
  CHECK(again.mean_table().values == coll.mean_table().values);
}

TEST_CASE("make_hard validation and warnings") {
  CHECK_THROWS_AS(make_hard({4, 5, 0.01, 0.4, RevealCode::binary, 0}), InvalidArgument);
  CHECK_THROWS_AS(make_hard({2, 3, 0.0, 0.4, RevealCode::binary, 0}), InvalidArgument);
  CHECK_THROWS_AS(make_hard({2, 3, 0.05, 0.4, RevealCode::binary, 0}), InvalidArgument);
  CHECK_THROWS_AS(make_hard({2, 3, 0.01, 0.6, RevealCode::binary, 0}), InvalidArgument);
  std::vector<std::string> warnings;
  make_hard({2, 3, 0.02, 0.3, RevealCode::binary, 0}, &warnings);
  CHECK(warnings.size() == 1);
  warnings.clear();
  make_hard({2, 3, 0.001, 0.45, RevealCode::binary, 0}, &warnings);
  CHECK(warnings.empty());
}

TEST_CASE("make_rand") {
  Rng rng(10);
  const auto r = make_rand(10, 20, 0.4, rng);
  CHECK(check_separation(r.collection, 0.4).separated);
  CHECK(r.attempts >= 1);
  for (double v : r.collection.mean_table().values) {
    CHECK(v >= 0.05);
    CHECK(v <= 0.95);
  }
  Rng rng1(5);
  CHECK(make_rand(1, 3, 0.4, rng1).attempts == 1);

  Rng a(77);
  Rng b(77);
  CHECK(make_rand(5, 5, 0.3, a).collection.mean_table().values ==
        make_rand(5, 5, 0.3, b).collection.mean_table().values);

  Rng hopeless(1);
  CHECK_THROWS_AS(make_rand(10, 1, 0.8, hopeless, 50), SeparationUnsatisfiable);
}

TEST_CASE("check_separation witnesses and failures") {
  const auto hard2 = make_hard({2, 3, 0.01, 0.4, RevealCode::binary, 0});
  const auto rep = check_separation(hard2, 0.39);
  CHECK(rep.separated);
  CHECK(rep.witness.at({0, 1}) == 2);
  CHECK_FALSE(check_separation(hard2, 0.4).separated);

  const auto dup = testing::bernoulli({{0.2, 0.8}, {0.2, 0.8}});
  const auto bad = check_separation(dup, 0.1);
  CHECK_FALSE(bad.separated);
  REQUIRE(bad.failing_pair.has_value());
  CHECK(bad.failing_pair->first == 0);
  CHECK(bad.failing_pair->second == 1);
  CHECK(check_separation(testing::bernoulli({{0.3}}), 0.9).separated);
}

TEST_CASE("hellinger separation") {
  const auto far = testing::bernoulli({{0.9, 0.5}, {0.1, 0.5}});
  CHECK(check_hellinger_separation(far, 0.5));
  CHECK(check_hellinger_separation(far, std::sqrt(0.4)));
  CHECK_FALSE(check_hellinger_separation(far, 0.64));
  CHECK_FALSE(check_hellinger_separation(testing::bernoulli({{0.4}, {0.4}}), 0.1));
  const auto hard2 = make_hard({2, 3, 0.01, 0.4, RevealCode::binary, 0});
  CHECK(check_hellinger_separation(hard2, 0.2));
  CHECK(hellinger_separation_level(hard2) == doctest::Approx(std::sqrt(1.0 - 2.0 * std::sqrt(0.21))));
  CHECK(hellinger_separation_level(testing::bernoulli({{0.4}, {0.4}})) == 0.0);
}

TEST_CASE("empirical arm means concentrate") {
  const auto coll = make_hard({2, 3, 0.01, 0.4, RevealCode::binary, 0});
  const int n = 2000;
  const double radius = 3.0 * std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
  int inside = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    Rng rng(1000 + t);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_reward(coll.instance(1), testing::kUnit, 2, rng);
    inside += std::abs(sum / n - 0.3) <= radius;
  }
  CHECK(inside >= 198);
}
