#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metaband/rng.hpp"

namespace metaband {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);

/// Finite-support categorical distribution over context vectors.
/// The non-contextual case is the singleton support {(1)}.
class ContextDistribution {
 public:
  ContextDistribution(std::vector<Vector> support, std::vector<double> weights,
                      double l1_bound = 1e6);

  static ContextDistribution non_contextual() { return ContextDistribution({{1.0}}, {1.0}); }

  std::size_t dim() const { return support_.front().size(); }
  std::size_t size() const { return support_.size(); }
  const std::vector<Vector>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  const Vector& at(std::size_t idx) const { return support_[idx]; }
  bool is_singleton() const { return support_.size() == 1; }

  /// Index of a support vector drawn with probability equal to its weight.
  std::size_t sample_index(Rng& rng) const;

 private:
  std::vector<Vector> support_;
  std::vector<double> weights_;
};

/// Draws a context vector; see ContextDistribution::sample_index.
const Vector& sample_context(const ContextDistribution& dist, Rng& rng);

enum class NoiseKind { bernoulli, gaussian };

struct Noise {
  NoiseKind kind = NoiseKind::bernoulli;
  double sigma = 0.0;  // gaussian only

  static Noise bernoulli() { return {NoiseKind::bernoulli, 0.0}; }
  static Noise gaussian(double sigma) { return {NoiseKind::gaussian, sigma}; }
  bool operator==(const Noise&) const = default;
};

/// Reward distribution of one (task, context, arm) triple.
struct RewardDist {
  Noise noise;
  double mean = 0.0;
};

/// Linear contextual bandit: arm k pays x.theta[k] plus noise.
struct BanditInstance {
  std::vector<Vector> theta;  // K x d
  std::vector<Noise> noise;   // one per arm

  std::size_t num_arms() const { return theta.size(); }
  double expected_reward(std::span<const double> x, std::size_t arm) const;
  RewardDist reward_dist(std::span<const double> x, std::size_t arm) const;
};

double sample_reward(const BanditInstance& inst, std::span<const double> x, std::size_t arm, Rng& rng);

/// Dense M x K table of per-arm mean rewards.
struct MeanTable {
  std::size_t tasks = 0;
  std::size_t arms = 0;
  std::vector<double> values;

  double operator()(std::size_t task, std::size_t arm) const { return values[task * arms + arm]; }
};

/// Immutable family of M bandit instances sharing K arms and a context
/// distribution. Mean rewards mu_ik = E_P[x.theta_ik] are tabulated on
/// construction.
class BanditCollection {
 public:
  BanditCollection(std::vector<BanditInstance> instances, ContextDistribution context, double lambda);

  std::size_t num_tasks() const { return instances_.size(); }
  std::size_t num_arms() const { return instances_.front().num_arms(); }
  std::size_t dim() const { return context_.dim(); }
  double lambda() const { return lambda_; }

  const std::vector<BanditInstance>& instances() const { return instances_; }
  const BanditInstance& instance(std::size_t task) const { return instances_[task]; }
  const ContextDistribution& context() const { return context_; }

  double mean(std::size_t task, std::size_t arm) const { return means_[task * num_arms() + arm]; }
  MeanTable mean_table() const { return {num_tasks(), num_arms(), means_}; }
  /// Expected reward of `arm` for `task` at the support context `ctx`.
  double mean_at(std::size_t task, std::size_t ctx, std::size_t arm) const {
    return ctx_means_[(task * context_.size() + ctx) * num_arms() + arm];
  }

  /// Best arm of `task` at support context `ctx` (lowest index on ties).
  std::size_t best_arm_at(std::size_t task, std::size_t ctx) const;
  /// Best arm of `task` for the context-averaged means.
  std::size_t optimal_arm(std::size_t task) const;
  double optimal_value(std::size_t task) const { return mean(task, optimal_arm(task)); }

  /// Largest sigma over all Gaussian arms, 1/2 when any arm is Bernoulli.
  double noise_scale() const;
  bool all_bernoulli() const;

  /// min over tasks, contexts and suboptimal arms of the action gap. Zero
  /// when some context has tied best arms.
  double min_action_gap() const;

 private:
  std::vector<BanditInstance> instances_;
  ContextDistribution context_;
  double lambda_;
  std::vector<double> means_;
  std::vector<double> ctx_means_;
};

/// Exact mu_ik = sum_x P(x) x.theta_ik.
double mean_reward(const BanditCollection& coll, std::size_t task, std::size_t arm);

enum class RevealCode { binary, random_balanced };

struct HardParams {
  std::size_t num_tasks = 2;
  std::size_t num_arms = 3;
  double epsilon = 0.01;
  double lambda = 0.4;
  RevealCode code = RevealCode::binary;
  std::uint64_t seed = 0;  // used by random_balanced only
};

/// Number of bits needed to index `m` tasks.
std::size_t code_bits(std::size_t m);

/// Non-contextual Bernoulli collection in which arm i is the unique best arm
/// of task i (3/4 + 10 eps, and 3/4 for every other task) and arms M..K-1
/// reveal the task identity through means (1 +- lambda) / 2.
BanditCollection make_hard(const HardParams& params, std::vector<std::string>* warnings = nullptr);

struct RandResult {
  BanditCollection collection;
  std::size_t attempts;
};

/// Non-contextual Bernoulli collection with means uniform on [0.05, 0.95],
/// redrawn as a whole until check_separation(lambda) holds.
RandResult make_rand(std::size_t num_tasks, std::size_t num_arms, double lambda, Rng& rng,
                     std::size_t max_retries = 10000);

struct SeparationReport {
  bool separated = true;
  /// One arm with |mu_ik - mu_jk| > lambda for every separated pair i < j.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> witness;
  std::optional<std::pair<std::size_t, std::size_t>> failing_pair;
};

/// Mean separation with strict inequality: gaps equal to lambda fail.
SeparationReport check_separation(const BanditCollection& coll, double lambda);

/// Every pair has an arm whose Hellinger quantity reaches lambda^2.
bool check_hellinger_separation(const BanditCollection& coll, double lambda);

/// Largest lambda for which check_hellinger_separation holds (0 when two
/// tasks coincide on every arm).
double hellinger_separation_level(const BanditCollection& coll);

/// Hellinger level guaranteed by the collection's mean separation: a
/// Bernoulli gap above lambda gives 1 - BC >= 1 - sqrt(1 - lambda^2). Falls
/// back to hellinger_separation_level for non-Bernoulli collections. This is
/// the default ECE level.
double implied_hellinger_level(const BanditCollection& coll);

}  // namespace metaband
