#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "helpers.hpp"
#include "metaband/error.hpp"
#include "metaband/io.hpp"
#include "metaband/tree.hpp"

using namespace metaband;

namespace {

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("collection round trip is bit exact") {
  Rng rng(21);
  std::vector<BanditInstance> inst;
  for (int i = 0; i < 3; ++i) {
    BanditInstance b;
    for (int k = 0; k < 4; ++k) {
      b.theta.push_back({rng.uniform(0.0, 0.5), rng.uniform(0.0, 0.5)});
      b.noise.push_back(k % 2 ? Noise::gaussian(rng.uniform(0.1, 1.0)) : Noise::bernoulli());
    }
    inst.push_back(b);
  }
  const double w = rng.uniform(0.1, 0.9);
  BanditCollection coll(inst, ContextDistribution({{1.0, 0.0}, {0.3, 0.7}}, {w, 1.0 - w}), 0.123456789012345678);
  const auto back = collection_from_json(collection_to_json(coll));
  REQUIRE(back.num_tasks() == 3);
  REQUIRE(back.num_arms() == 4);
  CHECK(bitwise_equal(back.lambda(), coll.lambda()));
  CHECK(bitwise_equal(back.context().weights()[0], w));
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 4; ++k) {
      CHECK(back.instance(i).noise[k] == coll.instance(i).noise[k]);
      for (int d = 0; d < 2; ++d) CHECK(bitwise_equal(back.instance(i).theta[k][d], coll.instance(i).theta[k][d]));
    }
  }
  CHECK(collection_to_json(back) == collection_to_json(coll));
}

TEST_CASE("collection parse errors") {
  CHECK_THROWS_AS(collection_from_json("{"), ParseError);
  CHECK_THROWS_AS(collection_from_json(R"({"M":1,"K":1,"d":1})"), ParseError);
  CHECK_THROWS_AS(
      collection_from_json(R"({"M":2,"K":1,"d":1,"lambda":0.4,"instances":[{"theta":[[0.5]],"noise":"bernoulli"}]})"),
      ParseError);
  CHECK_THROWS_AS(
      collection_from_json(R"({"M":1,"K":1,"d":1,"lambda":0.4,"instances":[{"theta":[[0.5]],"noise":"cauchy"}]})"),
      ParseError);
  const auto ok =
      collection_from_json(R"({"M":1,"K":2,"d":1,"lambda":0.4,"instances":[{"theta":[[0.5],[0.25]]}]})");
  CHECK(ok.mean(0, 1) == 0.25);
  CHECK(ok.context().is_singleton());
}

TEST_CASE("shipped fixtures load") {
  for (const char* name : {"hard-2.json", "hard-3.json", "hard-4.json", "hard-5-10.json", "rand-10-20.json",
                           "rand-40-40.json", "triangle-3.json", "ctx-gauss-2-2.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(testing::fixture(name));
  }
}

TEST_CASE("estimate round trip") {
  EstimatedCollection est;
  est.tasks = 2;
  est.arms = 2;
  est.dim = 1;
  est.theta = {{0.1}, {0.2}, {0.30000000000000004}, {0.4}};
  est.mu = {0.1, 0.2, 0.30000000000000004, 0.4};
  est.n_est = 99;
  est.seed = 12345678901234ULL;
  const auto back = estimate_from_json(estimate_to_json(est));
  CHECK(back.theta == est.theta);
  CHECK(back.mu == est.mu);
  CHECK(back.n_est == 99);
  CHECK(back.seed == est.seed);
  est.mu[0] = 3.0;
  CHECK_THROWS_AS(estimate_from_json(estimate_to_json(est)), ParseError);
}

TEST_CASE("tree round trip keeps node order") {
  const auto coll = testing::fixture("hard-4.json");
  const auto tree = build_tree(coll.mean_table(), 0.4);
  const auto back = tree_from_json(tree_to_json(tree));
  CHECK(back == tree);
  CHECK_THROWS_AS(tree_from_json(R"({"arm":0,"threshold":0.5,"lambda":0.4})"), ParseError);
  const auto leaf = tree_from_json(R"({"leaf":3})");
  CHECK(leaf.root().is_leaf);
  CHECK(leaf.root().task == 3);
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("write_text replaces files atomically") {
  const auto dir = std::filesystem::temp_directory_path() / "metaband_io_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "sub" / "x.txt";
  write_text(path, "one");
  write_text(path, "two");
  CHECK(read_text(path) == "two");
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  CHECK_THROWS_AS(read_text(dir / "missing"), Error);
  std::filesystem::remove_all(dir);
}
