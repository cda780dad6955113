#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "metaband/envsim.hpp"
#include "metaband/game.hpp"

namespace metaband {

/// Bit i set <=> task i is a member. Collections are limited to 64 tasks.
using TaskMask = std::uint64_t;

inline constexpr std::size_t kMaxTasks = 64;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Sorted, duplicate-free subset of task indices.
class HypothesisSet {
 public:
  HypothesisSet() = default;
  explicit HypothesisSet(std::vector<std::size_t> members);

  static HypothesisSet full(std::size_t num_tasks);
  static HypothesisSet from_mask(TaskMask mask);

  const std::vector<std::size_t>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(std::size_t task) const;
  TaskMask mask() const;

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  bool operator==(const HypothesisSet&) const = default;

 private:
  std::vector<std::size_t> members_;
};

/// Set of single-arm tests.
struct TestClass {
  std::vector<std::size_t> arms;

  static TestClass all_arms(std::size_t num_arms);
  /// Every arm that is not the (context-averaged) best arm of some task.
  static TestClass separating_arms(const BanditCollection& coll);
};

/// For each arm and true task, the mask of tasks whose law on that arm is at
/// Hellinger level lambda or more from the true task's law.
class SeparationTable {
 public:
  SeparationTable(const BanditCollection& coll, double lambda);

  std::size_t num_tasks() const { return tasks_; }
  std::size_t num_arms() const { return arms_; }
  TaskMask separated(std::size_t arm, std::size_t task) const { return masks_[arm * tasks_ + task]; }

 private:
  std::size_t tasks_;
  std::size_t arms_;
  std::vector<TaskMask> masks_;
};

/// Members of S that a test on `arm` rules out when `true_task` generates the
/// data. Never contains `true_task`.
HypothesisSet elimination_set(const BanditCollection& coll, const HypothesisSet& subset, std::size_t arm,
                              std::size_t true_task, double lambda);

/// max over tests of min over members of |S cap separated(test, i)|.
std::size_t greedy_value(const SeparationTable& table, std::span<const std::size_t> tests, TaskMask subset);

struct Coefficient {
  double value = 1.0;  // +inf when some subset cannot be classified
  TaskMask witness = 0;
};

inline constexpr std::size_t kMaxCoefficientTasks = 20;
inline constexpr std::size_t kMaxDepthTasks = 15;

/// Deterministic classification coefficient: worst subset S (|S| > 1) of
/// min over tests of max over members of |S| / |eliminated|.
Coefficient classification_coefficient(const BanditCollection& coll, const TestClass& tests, double lambda);

/// Randomized classification coefficient, each subset's inner game solved
/// by multiplicative weights until its coefficient is bracketed within `tol`.
Coefficient randomized_coefficient(const BanditCollection& coll, const TestClass& tests, double lambda,
                                   double tol = 1e-4, std::size_t max_iter = 2000000);

/// Value of the randomized game on one subset: max over test mixtures of
/// min over members of the expected elimination count.
GameSolution randomized_subset_game(const SeparationTable& table, std::span<const std::size_t> tests, TaskMask subset,
                                    double tol = 1e-6, std::size_t max_iter = 100000);

/// Optimal depth of a deterministic tree that identifies the task from exact
/// arm means. Splits cut at midpoints between consecutive distinct means of
/// the members and are admissible when that gap is at least `lambda`.
double optimal_tree_depth(const MeanTable& means, const TestClass& tests, double lambda);
double optimal_tree_depth(const BanditCollection& coll, const TestClass& tests, double lambda);

struct CoefficientReport {
  double lambda = 0.0;       // Hellinger level for C and C~
  double star_lambda = 0.0;  // mean gap for C*
  double c_det = kInfinity;
  double c_rand = kInfinity;
  double c_star = kInfinity;
  TaskMask witness_subset = 0;
  bool rand_le_det = false;
  /// Compared, never asserted: brute force disagrees on some instances.
  bool det_le_star = false;
  bool star_le_det_log = false;
};

/// `star_lambda` defaults to `lambda`.
CoefficientReport coefficient_report(const BanditCollection& coll, double lambda, double tol = 1e-4,
                                     std::optional<double> star_lambda = std::nullopt);

}  // namespace metaband
