#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "metaband/envsim.hpp"
#include "metaband/rng.hpp"
#include "metaband/tree.hpp"

namespace metaband {

/// Offline access to one task: contexts from P and rewards from nu_i(x, k).
class Simulator {
 public:
  virtual ~Simulator() = default;
  virtual std::size_t num_arms() const = 0;
  virtual std::size_t dim() const = 0;
  virtual const Vector& sample_context(Rng& rng) const = 0;
  virtual double sample_reward(std::span<const double> x, std::size_t arm, Rng& rng) const = 0;
};

/// Simulator backed by one task of a known collection.
class CollectionSimulator final : public Simulator {
 public:
  CollectionSimulator(const BanditCollection& coll, std::size_t task) : coll_(&coll), task_(task) {}

  std::size_t num_arms() const override { return coll_->num_arms(); }
  std::size_t dim() const override { return coll_->dim(); }
  const Vector& sample_context(Rng& rng) const override { return metaband::sample_context(coll_->context(), rng); }
  double sample_reward(std::span<const double> x, std::size_t arm, Rng& rng) const override {
    return metaband::sample_reward(coll_->instance(task_), x, arm, rng);
  }

 private:
  const BanditCollection* coll_;
  std::size_t task_;
};

std::vector<std::unique_ptr<Simulator>> simulators_for(const BanditCollection& coll);

/// Per-(task, arm) regression estimates.
struct EstimatedCollection {
  std::size_t tasks = 0;
  std::size_t arms = 0;
  std::size_t dim = 0;
  std::vector<Vector> theta;  // tasks x arms, each of length dim
  std::vector<double> mu;     // tasks x arms
  std::size_t n_est = 0;
  std::uint64_t seed = 0;

  const Vector& theta_hat(std::size_t task, std::size_t arm) const { return theta[task * arms + arm]; }
  double mu_hat(std::size_t task, std::size_t arm) const { return mu[task * arms + arm]; }
  MeanTable mean_table() const { return {tasks, arms, mu}; }

  /// argmax_k x.theta_hat (lowest arm on ties).
  std::size_t best_arm(std::size_t task, std::span<const double> x) const;

  /// Dimensions consistent and every mu_hat inside [-0.5, 1.5].
  void validate() const;
};

/// Exact estimate: theta and mu taken from the collection itself.
EstimatedCollection exact_estimate(const BanditCollection& coll);

struct ArmEstimate {
  Vector theta;
  double mu = 0.0;
};

inline constexpr double kRidge = 1e-8;

/// Least squares on n_est draws, with kRidge * I added to X X'.
ArmEstimate estimate_task_arm(const Simulator& sim, std::size_t arm, std::size_t n_est, Rng& rng);

/// ceil(160 sigma^2 d ln(4 H M K) / min(gap^2, lambda^2))
std::size_t n_est_formula(double sigma, std::size_t dim, std::size_t horizon, std::size_t num_tasks,
                          std::size_t num_arms, double gap, double lambda);

struct MetaTrainConfig {
  std::size_t horizon = 10000;
  double gap = 0.0;     // minimum action gap
  double lambda = 0.0;  // mean separation of the true collection
  /// Band level of the tree. Defaults to lambda / 2, the separation the
  /// estimates keep when every error is within lambda / 4.
  std::optional<double> tree_lambda;
  double sigma = 0.5;
  std::uint64_t seed = 0;
  /// Overrides the formula when set.
  std::optional<std::size_t> n_est;
};

struct MetaTrainResult {
  EstimatedCollection estimate;
  DecisionTree tree;
  std::size_t n_est = 0;
  std::uint64_t total_samples = 0;
  double lambda = 0.0;       // separation level the estimates were sized for
  double tree_lambda = 0.0;  // band level used by build_tree
};

/// Estimates every (task, arm) pair from its simulator, then builds the
/// classification tree on the estimated means at cfg.tree_lambda. Stream i * K + k of `seed`
/// drives pair (i, k).
MetaTrainResult meta_train(std::span<const std::unique_ptr<Simulator>> simulators, const MetaTrainConfig& cfg);

}  // namespace metaband
