#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "metaband/complexity.hpp"
#include "metaband/envsim.hpp"
#include "metaband/rng.hpp"
#include "metaband/trajectory.hpp"

namespace metaband {

struct EceConfig {
  double delta = 0.05;
  /// Hellinger separation level used for the greedy tests and N_cls.
  double lambda = 0.0;
  std::optional<std::size_t> n_cls;
  std::optional<std::size_t> max_rounds;
  /// Empty means every arm.
  TestClass tests;
  /// Noise-free mode: log-likelihoods are replaced by their expectation
  /// under the true task and rewards by their means.
  bool oracle = false;
  /// Clamp Bernoulli means to [1e-9, 1 - 1e-9] inside the likelihood.
  bool clamp = true;
};

/// ceil(2 ln(M / delta) / lambda^2)
std::size_t default_ece_n_cls(std::size_t num_tasks, double delta, double lambda);
/// M * ceil(ln(M / delta)) + 1
std::size_t default_max_rounds(std::size_t num_tasks, double delta);

/// The test maximizing the worst-case elimination count over S; ties go to
/// the lowest arm. Throws NoSeparatingTest when that count is zero.
std::size_t greedy_test(const HypothesisSet& subset, const SeparationTable& table, const TestClass& tests);
std::size_t greedy_test(const HypothesisSet& subset, const BanditCollection& coll, const TestClass& tests,
                        double lambda);

struct Sample {
  std::size_t context = 0;
  double reward = 0.0;
};

inline constexpr double kLikelihoodClamp = 1e-9;

/// Sum of log reward-likelihoods of `samples` under `task` when `arm` was
/// pulled. The context factor is shared by all tasks and left out. Returns
/// -inf when some sample is impossible under `task`.
double loglik(const BanditCollection& coll, std::size_t task, std::size_t arm, std::span<const Sample> samples,
              bool clamp = true);

/// n times the expected per-sample log-likelihood of `task` when data come
/// from `true_task`.
double expected_loglik(const BanditCollection& coll, std::size_t task, std::size_t true_task, std::size_t arm,
                       std::size_t n, bool clamp = true);

/// Keeps the members whose log-likelihood is within 3 ln(M / delta) of the
/// best one. `logliks` is aligned with `subset.members()`.
HypothesisSet survivors(const HypothesisSet& subset, std::span<const double> logliks, std::size_t num_tasks,
                        double delta);

HypothesisSet update_hypotheses(const HypothesisSet& subset, std::size_t arm, std::span<const Sample> samples,
                                const BanditCollection& coll, double delta, bool clamp = true);

struct RoundLog {
  std::size_t round = 0;
  std::size_t arm = 0;
  HypothesisSet before;
  std::vector<Sample> samples;
  std::vector<double> logliks;  // aligned with before.members()
  HypothesisSet after;
};

struct EceResult {
  Episode episode;
  std::vector<RoundLog> rounds;
  std::size_t n_cls = 0;
};

/// Explicit classify then exploit against a known collection.
EceResult run_ece(const BanditCollection& coll, std::size_t true_task, const EceConfig& cfg, std::size_t horizon,
                  Rng& rng);

}  // namespace metaband
