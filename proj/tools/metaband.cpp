// metaband command-line front end.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>

#include "metaband/complexity.hpp"
#include "metaband/dec.hpp"
#include "metaband/error.hpp"
#include "metaband/harness.hpp"
#include "metaband/io.hpp"
#include "metaband/metatrain.hpp"
#include "metaband/report.hpp"

using namespace metaband;

namespace {

struct GenEnvArgs {
  std::string kind = "hard";
  std::size_t m = 2;
  std::size_t k = 3;
  double lambda = 0.4;
  double epsilon = 0.01;
  std::string code = "binary";
  std::uint64_t seed = 0;
  std::string out;
};

int gen_env(const GenEnvArgs& a) {
  if (a.kind == "hard") {
    HardParams params{a.m, a.k, a.epsilon, a.lambda,
                          a.code == "random" ? RevealCode::random_balanced : RevealCode::binary, a.seed};
    std::vector<std::string> warnings;
    const auto coll = make_hard(params, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    save_collection(a.out, coll);
  } else if (a.kind == "rand") {
    Rng rng(a.seed);
    const auto res = make_rand(a.m, a.k, a.lambda, rng);
    std::cerr << "accepted after " << res.attempts << " draws\n";
    save_collection(a.out, res.collection);
  } else {
    throw InvalidArgument("--kind must be hard or rand");
  }
  return 0;
}

struct CoeffArgs {
  std::string env;
  double lambda = 0.0;
  std::optional<double> star_lambda;
  bool dec = false;
  double epsilon = 0.0;
  double gamma_max = 100.0;
  std::size_t gamma_points = 50;
  double tol = 1e-4;
  std::string out;
};

int coeffs(const CoeffArgs& a) {
  const auto coll = load_collection(a.env);
  const auto report = coefficient_report(coll, a.lambda, a.tol, a.star_lambda);
  std::optional<DecScan> scan;
  if (a.dec) {
    std::vector<double> grid;
    for (std::size_t i = 0; i < a.gamma_points; ++i) {
      grid.push_back(a.gamma_max * static_cast<double>(i) / static_cast<double>(a.gamma_points - 1));
    }
    scan = dec_threshold_scan(coll, a.epsilon, a.lambda, grid);
  }
  const std::string text = coefficients_json(report, scan);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
  return 0;
}

struct MetaTrainArgs {
  std::string env;
  double lambda = 0.0;
  std::optional<double> tree_lambda;
  std::size_t horizon = 10000;
  std::optional<double> gap;
  std::optional<std::size_t> n_est;
  std::uint64_t seed = 0;
  std::string out_tree;
  std::string out_est;
  bool render = false;
};

int meta_train_cmd(const MetaTrainArgs& a) {
  const auto coll = load_collection(a.env);
  MetaTrainConfig cfg;
  cfg.horizon = a.horizon;
  cfg.gap = a.gap.value_or(coll.min_action_gap());
  cfg.lambda = a.lambda > 0.0 ? a.lambda : coll.lambda();
  cfg.tree_lambda = a.tree_lambda;
  cfg.sigma = coll.noise_scale();
  cfg.seed = a.seed;
  cfg.n_est = a.n_est;
  const auto res = meta_train(simulators_for(coll), cfg);
  if (!a.out_tree.empty()) save_tree(a.out_tree, res.tree);
  if (!a.out_est.empty()) save_estimate(a.out_est, res.estimate);
  std::cerr << "n_est " << res.n_est << ", total samples " << res.total_samples << ", depth " << res.tree.depth()
            << ", leaves " << res.tree.num_leaves() << "\n";
  if (a.render) std::cout << res.tree.render();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meta-learned exploration plans for finite bandit collections"};
  app.require_subcommand(1);

  GenEnvArgs ge;
  auto* gen = app.add_subcommand("gen-env", "Generate a hard or rand collection");
  gen->add_option("--kind", ge.kind, "hard or rand")->check(CLI::IsMember({"hard", "rand"}));
  gen->add_option("--M", ge.m, "Number of tasks")->required();
  gen->add_option("--K", ge.k, "Number of arms")->required();
  gen->add_option("--lambda", ge.lambda, "Separation level")->required();
  gen->add_option("--epsilon", ge.epsilon, "Margin of the optimal arms (hard)");
  gen->add_option("--code", ge.code, "Revealing-arm code (hard)")->check(CLI::IsMember({"binary", "random"}));
  gen->add_option("--seed", ge.seed);
  gen->add_option("--out", ge.out)->required();

  CoeffArgs ca;
  auto* co = app.add_subcommand("coeffs", "Classification coefficients and DEC scan");
  co->add_option("--env", ca.env)->required()->check(CLI::ExistingFile);
  co->add_option("--lambda", ca.lambda, "Hellinger separation level")->required();
  co->add_option("--star-lambda", ca.star_lambda, "Mean gap for the optimal tree depth");
  co->add_flag("--dec", ca.dec, "Also scan dec_gamma");
  co->add_option("--epsilon", ca.epsilon, "Margin used for the 3 eps comparison");
  co->add_option("--gamma-max", ca.gamma_max);
  co->add_option("--gamma-points", ca.gamma_points)->check(CLI::Range(2, 100000));
  co->add_option("--tol", ca.tol);
  co->add_option("--out", ca.out, "Write the report here instead of stdout");

  MetaTrainArgs mt;
  auto* me = app.add_subcommand("meta-train", "Estimate every task and build the exploration plan");
  me->add_option("--env", mt.env)->required()->check(CLI::ExistingFile);
  me->add_option("--lambda", mt.lambda, "Mean separation (default: the collection's)");
  me->add_option("--tree-lambda", mt.tree_lambda, "Band level of the tree (default: lambda / 2)");
  me->add_option("--H", mt.horizon, "Test horizon")->check(CLI::PositiveNumber);
  me->add_option("--gap", mt.gap, "Minimum action gap (default: exact, from the collection)");
  me->add_option("--n-est", mt.n_est, "Samples per (task, arm), overriding the formula");
  me->add_option("--seed", mt.seed);
  me->add_option("--out-tree", mt.out_tree);
  me->add_option("--out-est", mt.out_est);
  me->add_flag("--render", mt.render, "Print the plan as text");

  ExperimentConfig rc;
  rc.runs = 1;
  rc.checkpoints = 0;
  std::string algo;
  std::size_t task = 0;
  std::string tree_file;
  std::string est_file;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run one algorithm on one task");
  run->add_option("--algo", algo)->required()->check(CLI::IsMember({"ece", "dtece", "mucb", "mts", "oracle"}));
  run->add_option("--env", rc.env_file)->required()->check(CLI::ExistingFile);
  run->add_option("--task", task)->required();
  run->add_option("--horizon", rc.horizon)->check(CLI::PositiveNumber);
  run->add_option("--runs", rc.runs)->check(CLI::PositiveNumber);
  run->add_option("--delta", rc.delta);
  run->add_option("--lambda", rc.ece_lambda, "ECE Hellinger level (default: implied by the mean separation)");
  run->add_option("--seed", rc.seed);
  run->add_option("--tree", tree_file);
  run->add_option("--est", est_file);
  run->add_option("--sep-lambda", rc.sep_lambda, "DT-ECE separation level (default: the collection's)");
  run->add_option("--n-cls", rc.n_cls, "DT-ECE samples per node");
  run->add_flag("--short-constant", rc.short_constant, "DT-ECE: 2 ln(2HD) / lambda^2 per node");
  run->add_flag("--realized", rc.realized, "Accumulate realized instead of expected regret");
  run->add_option("--out", run_out)->required();
  run->add_option("--summary", rc.summary_out);

  std::string config_file;
  auto* ex = app.add_subcommand("experiment", "Run an experiment grid from a JSON config");
  ex->add_option("--config", config_file)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return gen_env(ge);
    if (*co) return coeffs(ca);
    if (*me) return meta_train_cmd(mt);
    if (*run) {
      rc.algos = {parse_algo(algo)};
      rc.tasks = {task};
      rc.checkpoints = rc.horizon;  // every step
      rc.sup_over_tasks = false;
      rc.csv_out = run_out;
      if (!tree_file.empty()) rc.tree_file = tree_file;
      if (!est_file.empty()) rc.est_file = est_file;
      const auto exp = run_experiment(rc);
      exp.write_outputs();
      for (const auto& tr : exp.traces) {
        std::cerr << algo_name(tr.algo) << " task " << tr.task << " run " << tr.run << ": regret " << tr.cum.back()
                  << ", classification pulls " << tr.classification_pulls
                  << (tr.misclassified ? ", misclassified" : "") << "\n";
      }
      return 0;
    }
    if (*ex) {
      const std::filesystem::path path(config_file);
      const auto cfg = experiment_config_from_json(read_text(path), path.parent_path());
      const auto exp = run_experiment(cfg);
      exp.write_outputs();
      if (!cfg.csv_out && !cfg.summary_out) std::cout << exp.summary_json();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
