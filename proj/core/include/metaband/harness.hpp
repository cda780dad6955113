#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metaband/envsim.hpp"
#include "metaband/metatrain.hpp"

namespace metaband {

enum class Algo { ece, dtece, mucb, mts, oracle };

const char* algo_name(Algo a);
Algo parse_algo(std::string_view name);

struct ExperimentConfig {
  std::filesystem::path env_file;
  std::string env_name;  // CSV label; defaults to the env file stem
  std::vector<Algo> algos;
  std::size_t horizon = 10000;
  std::size_t runs = 20;
  std::uint64_t seed = 0;
  std::vector<std::size_t> tasks;  // empty means every task
  bool sup_over_tasks = true;
  /// Accumulate best mean minus the observed reward instead of expected gaps.
  bool realized = false;
  std::size_t checkpoints = 200;
  std::size_t threads = 0;  // 0: hardware concurrency

  // ece
  double delta = 0.05;
  std::optional<double> ece_lambda;  // default: implied_hellinger_level
  std::optional<std::size_t> ece_n_cls;

  // dtece
  std::optional<double> sep_lambda;   // mean separation; default: the collection's lambda
  std::optional<double> tree_lambda;  // band level; default: sep_lambda / 2
  std::optional<double> gap;          // default: the exact minimum action gap
  std::optional<std::size_t> n_est;
  std::optional<std::size_t> n_cls;
  bool short_constant = false;
  /// Skip estimation and build the tree on the true means.
  bool exact_estimate = false;
  std::optional<std::filesystem::path> tree_file;
  std::optional<std::filesystem::path> est_file;

  std::optional<std::filesystem::path> csv_out;
  std::optional<std::filesystem::path> aggregate_out;
  std::optional<std::filesystem::path> summary_out;

  void validate() const;
};

/// Reads a JSON config. Relative paths resolve against `base_dir`.
ExperimentConfig experiment_config_from_json(std::string_view text, const std::filesystem::path& base_dir = {});

struct RegretTrace {
  Algo algo = Algo::oracle;
  std::size_t task = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::vector<double> cum;  // cum[t - 1] after step t
  std::size_t classification_pulls = 0;
  bool misclassified = false;
  bool truncated = false;
};

/// `count` strictly increasing steps in [1, horizon], roughly log-spaced,
/// ending at horizon (fewer when horizon < count).
std::vector<std::size_t> log_checkpoints(std::size_t horizon, std::size_t count = 200);

/// base ^ hash(algo, task, run)
std::uint64_t run_seed(std::uint64_t base, Algo algo, std::size_t task, std::size_t run);

struct CiPoint {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
  bool has_ci = false;  // false for single-trace groups
};

/// mean +- 1.96 sd / sqrt(n) with the n - 1 sample deviation.
CiPoint aggregate_point(std::span<const double> values);

struct CurvePoint {
  std::size_t step = 0;
  CiPoint ci;
  std::size_t task = 0;  // the maximizing task on worst-case curves
};

struct Curve {
  Algo algo = Algo::oracle;
  std::optional<std::size_t> task;  // empty for the worst-case curve
  std::vector<CurvePoint> points;
};

struct Experiment {
  ExperimentConfig config;
  std::vector<std::size_t> tasks;
  std::vector<std::size_t> checkpoints;
  std::vector<RegretTrace> traces;  // ordered by algo, task, run
  std::optional<MetaTrainResult> meta;

  /// Per-task mean curves, then (with sup_over_tasks) one worst-case curve
  /// per algorithm taking the per-checkpoint max of the task means.
  std::vector<Curve> curves() const;
  std::string csv() const;
  std::string aggregate_csv() const;
  std::string summary_json() const;
  /// Writes every configured output.
  void write_outputs() const;
};

/// Test-time inputs for DT-ECE: from files, exact means, or inline meta-training.
MetaTrainResult prepare_dtece(const BanditCollection& coll, const ExperimentConfig& cfg);

RegretTrace run_trial(const BanditCollection& coll, Algo algo, std::size_t task, std::size_t run,
                      const ExperimentConfig& cfg, const MetaTrainResult* meta);

Experiment run_experiment(const BanditCollection& coll, const ExperimentConfig& cfg);
Experiment run_experiment(const ExperimentConfig& cfg);

}  // namespace metaband
