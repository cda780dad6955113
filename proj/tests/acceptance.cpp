// Acceptance checks. One PASS/FAIL line per criterion; exit code 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "helpers.hpp"
#include "metaband/complexity.hpp"
#include "metaband/dec.hpp"
#include "metaband/dtece.hpp"
#include "metaband/ece.hpp"
#include "metaband/harness.hpp"
#include "metaband/hellinger.hpp"
#include "metaband/metatrain.hpp"
#include "oracles.hpp"

using namespace metaband;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<std::string> kFixtures{"hard-2.json",     "hard-3.json",     "hard-4.json",    "hard-5-10.json",
                                         "rand-10-20.json", "rand-40-40.json", "triangle-3.json", "ctx-gauss-2-2.json"};

// Mean over runs per task at `step`, then max over tasks.
double worst_case_mean(const Experiment& exp, Algo algo, std::size_t step) {
  double worst = 0.0;
  for (std::size_t task : exp.tasks) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& tr : exp.traces) {
      if (tr.algo == algo && tr.task == task) sum += tr.cum[step - 1], ++n;
    }
    worst = std::max(worst, sum / static_cast<double>(n));
  }
  return worst;
}

Outcome classification_cost() {
  ExperimentConfig cfg;
  cfg.env_name = "rand-40-40";
  cfg.algos = {Algo::dtece};
  cfg.horizon = 10000;
  cfg.runs = 20;
  cfg.seed = 1;
  cfg.checkpoints = 10;
  cfg.sep_lambda = 0.4;
  // Classification depends on the tree only, so estimates are sized for the
  // separation level rather than the collection's tiny action gap.
  cfg.gap = 0.4;
  const auto exp = run_experiment(testing::fixture("rand-40-40.json"), cfg);
  double pulls = 0.0;
  std::size_t wrong = 0;
  for (const auto& tr : exp.traces) pulls += static_cast<double>(tr.classification_pulls), wrong += tr.misclassified;
  pulls /= static_cast<double>(exp.traces.size());
  return {pulls <= 1500.0, "mean classification pulls " + fmt("%.1f", pulls) + " (<= 1500) over " +
                               std::to_string(exp.traces.size()) + " trials, tree depth " +
                               std::to_string(exp.meta->tree.depth()) + ", misclassified " + std::to_string(wrong)};
}

Experiment hard_5_10(bool short_constant) {
  ExperimentConfig cfg;
  cfg.env_name = "hard-5-10";
  cfg.algos = {Algo::dtece, Algo::mucb};
  cfg.horizon = 10000;
  cfg.runs = 20;
  cfg.seed = 2;
  cfg.checkpoints = 10;
  cfg.sep_lambda = 0.4;
  cfg.short_constant = short_constant;
  return run_experiment(testing::fixture("hard-5-10.json"), cfg);
}

Outcome ordering() {
  const auto exp = hard_5_10(true);
  const std::size_t h = exp.config.horizon;
  const double dt = worst_case_mean(exp, Algo::dtece, h);
  const double mucb = worst_case_mean(exp, Algo::mucb, h);
  const double half = worst_case_mean(exp, Algo::dtece, h / 2);
  const double growth = (dt - half) / half;
  const auto def = hard_5_10(false);
  const double def_ratio = worst_case_mean(def, Algo::dtece, h) / worst_case_mean(def, Algo::mucb, h);
  const bool pass = dt < mucb / 3.0 && growth <= 0.02;
  return {pass, "worst-case regret dtece " + fmt("%.2f", dt) + " vs mucb " + fmt("%.2f", mucb) + " (ratio " +
                    fmt("%.3f", dt / mucb) + " < 0.333), second-half growth " + fmt("%.4f", growth) +
                    " (<= 0.02); n_cls 2ln(2HD)/lambda^2. info: 2ln(8HD)/lambda^2 ratio " + fmt("%.3f", def_ratio)};
}

Outcome ece_correctness() {
  std::string detail;
  bool pass = true;
  for (const char* name : {"hard-4.json", "rand-10-20.json"}) {
    const auto coll = testing::fixture(name);
    EceConfig cfg;
    cfg.delta = 0.05;
    cfg.lambda = implied_hellinger_level(coll);
    const int trials = 200;
    int wrong = 0;
    for (int t = 0; t < trials; ++t) {
      const std::size_t task = static_cast<std::size_t>(t) % coll.num_tasks();
      Rng rng(run_seed(3, Algo::ece, task, static_cast<std::size_t>(t)));
      wrong += run_ece(coll, task, cfg, 10000, rng).episode.classified != task;
    }
    const double freq = wrong / static_cast<double>(trials);
    pass = pass && freq <= 0.08;
    detail += std::string(detail.empty() ? "" : ", ") + name + " misclassification " + fmt("%.3f", freq);
  }
  return {pass, detail + " (<= 0.08)"};
}

Outcome contraction() {
  Rng rng(4);
  std::size_t collections = 0;
  std::size_t skipped = 0;
  std::size_t rounds = 0;
  std::size_t violations = 0;
  while (collections < 100) {
    const std::size_t m = 2 + rng.index(9);
    const std::size_t k = 4 + rng.index(9);
    const auto coll = make_rand(m, k, 0.3, rng).collection;
    EceConfig cfg;
    cfg.lambda = implied_hellinger_level(coll);
    cfg.oracle = true;
    const double c = classification_coefficient(coll, TestClass::all_arms(k), cfg.lambda).value;
    if (std::isinf(c)) {
      ++skipped;
      continue;
    }
    ++collections;
    for (std::size_t task = 0; task < m; ++task) {
      Rng play(task);
      const auto r = run_ece(coll, task, cfg, 1, play);
      if (r.episode.classified != task) ++violations;
      for (const auto& log : r.rounds) {
        ++rounds;
        const double need = std::ceil(static_cast<double>(log.before.size()) / c - 1e-12);
        if (static_cast<double>(log.before.size() - log.after.size()) < need) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(rounds) + " rounds on " +
                               std::to_string(collections) + " collections (" + std::to_string(skipped) +
                               " draws with infinite C skipped)"};
}

Outcome coefficients() {
  bool pass = true;
  std::string detail;
  const auto hard4 = testing::fixture("hard-4.json");
  const auto tests4 = TestClass::all_arms(hard4.num_arms());
  const double c4 = classification_coefficient(hard4, tests4, 0.2).value;
  const double c4_oracle = oracle::deterministic_coefficient(hard4, 0.2);
  const double star4 = optimal_tree_depth(hard4, tests4, 0.4);
  const double star4_oracle = oracle::optimal_depth(hard4.mean_table(), 0.4);
  pass = pass && c4 == 3.0 && c4_oracle == 3.0 && star4 == 2.0 && star4_oracle == 2.0;
  detail += "hard-4 C " + fmt("%g", c4) + " (brute force " + fmt("%g", c4_oracle) + "), C* " + fmt("%g", star4) +
            " (brute force " + fmt("%g", star4_oracle) + ")";

  double worst_grid = 0.0;
  for (const char* name : {"hard-2.json", "hard-3.json", "triangle-3.json"}) {
    const auto coll = testing::fixture(name);
    const double lambda = std::string(name) == "triangle-3.json" ? 0.25 : hellinger_separation_level(coll);
    const double mw = randomized_coefficient(coll, TestClass::all_arms(coll.num_arms()), lambda).value;
    worst_grid = std::max(worst_grid, std::abs(mw - oracle::randomized_coefficient_grid(coll, lambda)));
  }
  pass = pass && worst_grid <= 1e-3;
  detail += "; max |C~ - grid| on M <= 3 " + fmt("%.2e", worst_grid);

  bool le = true;
  std::string compare;
  for (const auto& name : kFixtures) {
    const auto coll = testing::fixture(name);
    if (coll.num_tasks() > kMaxCoefficientTasks) continue;
    const double lambda = implied_hellinger_level(coll);
    const auto r = coefficient_report(coll, lambda, 1e-4, coll.lambda());
    le = le && r.rand_le_det;
    compare += " " + name.substr(0, name.size() - 5) + ":" + fmt("%g", r.c_det) + "/" + fmt("%g", r.c_star);
  }
  pass = pass && le;
  detail += std::string("; C~ <= C + tol ") + (le ? "everywhere" : "VIOLATED") + "; info C/C*:" + compare;
  return {pass, detail};
}

Outcome dec_check() {
  const auto coll = testing::fixture("hard-2.json");
  const double eps = 0.01;
  const double dec0 = oracle::dec_two_tasks(coll, 0.0);
  const double dec0_mw = dec_coefficient(DecInstance::from_collection(coll, 0.0)).value;
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(0.5 * i);
  const auto scan = dec_threshold_scan(coll, eps, 0.4, grid);
  std::size_t bad = 0;
  for (std::size_t i = 1; i < scan.rows.size(); ++i) bad += scan.rows[i].dec > scan.rows[i - 1].dec + 1e-3;
  const bool pass = std::abs(dec0 - 5.0 * eps) <= 1e-3 && std::abs(dec0_mw - 5.0 * eps) <= 1e-3 && bad == 0 &&
                    scan.rows.front().dec > 3.0 * eps;
  return {pass, "dec_0 grid oracle " + fmt("%.6f", dec0) + ", solver " + fmt("%.6f", dec0_mw) + " (5 eps = 0.05), " +
                    std::to_string(bad) + " increases over 50 gammas, dec_0 > 3 eps; crossover at gamma " +
                    (scan.crossover ? fmt("%g", *scan.crossover) : std::string("none"))};
}

Outcome estimation_event() {
  const auto coll = testing::fixture("ctx-gauss-2-2.json");
  const std::size_t horizon = 100;
  const double gap = coll.min_action_gap();
  const double lambda = coll.lambda();
  const double tol = std::min(gap / 2.0, lambda / 4.0);
  const auto sims = simulators_for(coll);
  MetaTrainConfig base;
  base.horizon = horizon;
  base.gap = gap;
  base.lambda = lambda;
  base.sigma = 0.5;
  const int reps = 2000;
  std::vector<int> hit(reps, 0);
  std::size_t n_est = 0;
  const unsigned workers = std::max(1U, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int r = static_cast<int>(w); r < reps; r += static_cast<int>(workers)) {
        MetaTrainConfig cfg = base;
        cfg.seed = 70000 + static_cast<std::uint64_t>(r);
        const auto res = meta_train(sims, cfg);
        if (r == 0) n_est = res.n_est;
        for (std::size_t i = 0; i < coll.num_tasks() && !hit[r]; ++i) {
          for (std::size_t a = 0; a < coll.num_arms(); ++a) {
            double err = 0.0;
            for (std::size_t c = 0; c < coll.context().size(); ++c) {
              const auto& x = coll.context().at(c);
              err += coll.context().weights()[c] *
                     std::abs(dot(x, res.estimate.theta_hat(i, a)) - dot(x, coll.instance(i).theta[a]));
            }
            if (err > tol) hit[r] = 1;
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  int events = 0;
  for (int h : hit) events += h;
  const double p0 = 1.0 / (2.0 * horizon * coll.num_tasks() * coll.num_arms());
  const double bound = p0 + 3.0 * std::sqrt(p0 * (1.0 - p0) / reps);
  const double freq = events / static_cast<double>(reps);
  return {freq <= bound, "N_est " + std::to_string(n_est) + ", event frequency " + fmt("%.5f", freq) + " (<= " +
                             fmt("%.5f", bound) + ") over " + std::to_string(reps) + " repetitions"};
}

Outcome tree_suite() {
  bool pass = true;
  std::string detail;
  for (const auto& name : kFixtures) {
    const auto coll = testing::fixture(name);
    const auto means = coll.mean_table();
    // Band level used by meta-training.
    const double band = coll.lambda() / 2.0;
    const auto tree = build_tree(means, band);
    const bool ok = oracle_paths_correct(tree, means) && tree.depth() + 1 <= std::max<std::size_t>(coll.num_tasks(), 1) &&
                    build_tree(means, band) == tree;
    pass = pass && ok;
    detail += (detail.empty() ? "" : " ") + name.substr(0, name.size() - 5) + ":d" + std::to_string(tree.depth());
    if (coll.num_tasks() <= kMaxDepthTasks && coll.num_tasks() > 1) {
      const double star = optimal_tree_depth(coll, TestClass::all_arms(coll.num_arms()), coll.lambda());
      const double ratio =
          static_cast<double>(tree.depth()) / ((std::log2(static_cast<double>(coll.num_tasks())) + 1.0) * star);
      detail += std::isinf(star) ? std::string("/r n/a") : fmt("/r%.2f", ratio);
    }
    if (!ok) detail += "(FAIL)";
  }
  const auto hard = testing::fixture("hard-5-10.json");
  MetaTrainConfig cfg;
  cfg.lambda = 0.4;
  cfg.gap = hard.min_action_gap();
  cfg.seed = 8;
  cfg.n_est = 20000;
  const auto sims = simulators_for(hard);
  const auto a = meta_train(sims, cfg);
  const auto b = meta_train(sims, cfg);
  const bool same = a.tree == b.tree && a.estimate.mu == b.estimate.mu;
  pass = pass && same;
  return {pass, "oracle paths, depth <= M-1 and rebuilds hold on all fixtures; depth and depth/((log2 M+1) C*): " +
                    detail + "; seeded meta-train rebuild " + (same ? "identical" : "DIFFERS")};
}

Outcome reproducibility() {
  const auto dir = std::filesystem::temp_directory_path() / "metaband_acceptance_repro";
  std::filesystem::remove_all(dir);
  const std::string config = R"({
    "env": ")" + std::string(METABAND_FIXTURE_DIR) + R"(/hard-4.json",
    "algos": ["dtece", "ece", "mucb", "mts"], "horizon": 2000, "runs": 5, "seed": 9,
    "n_est": 2000, "checkpoints": 50,
    "out_csv": "raw.csv", "out_aggregate": "agg.csv", "out_summary": "summary.json"
  })";
  std::vector<std::string> outputs;
  for (int pass = 0; pass < 2; ++pass) {
    const auto cfg = experiment_config_from_json(config, dir / std::to_string(pass));
    run_experiment(cfg).write_outputs();
    outputs.push_back(read_text(dir / std::to_string(pass) / "raw.csv") + read_text(dir / std::to_string(pass) / "agg.csv") +
                      read_text(dir / std::to_string(pass) / "summary.json"));
  }
  std::filesystem::remove_all(dir);
  const bool same = outputs[0] == outputs[1] && !outputs[0].empty();
  return {same, std::string("raw CSV, aggregate CSV and summary ") + (same ? "byte-identical" : "DIFFER") +
                    " across two runs (" + std::to_string(outputs[0].size()) + " bytes)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 rand-40-40 classification cost", classification_cost},
      {"2 hard-5-10 ordering and plateau", ordering},
      {"3 ECE misclassification", ece_correctness},
      {"4 oracle-mode greedy contraction", contraction},
      {"5 coefficient oracles", coefficients},
      {"6 DEC check", dec_check},
      {"7 estimation event", estimation_event},
      {"8 tree structural suite", tree_suite},
      {"9 reproducibility", reproducibility},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%s] %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !out.pass;
  }
  return failed == 0 ? 0 : 1;
}
