#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "metaband/complexity.hpp"
#include "metaband/envsim.hpp"

namespace metaband {

struct TreeNode {
  bool is_leaf = true;
  std::size_t task = 0;  // leaves
  std::size_t arm = 0;
  double threshold = 0.0;
  double lambda = 0.0;
  int true_child = -1;   // mean <= threshold
  int false_child = -1;  // mean > threshold
  std::vector<std::size_t> tasks;  // tasks reaching this node

  bool operator==(const TreeNode&) const = default;
};

/// Interpretable exploration plan: internal nodes test "mean of arm k <=
/// threshold"; each leaf names one task. Node 0 is the root.
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(std::size_t idx) const { return nodes_[idx]; }
  const TreeNode& root() const { return nodes_.front(); }
  bool empty() const { return nodes_.empty(); }

  std::size_t depth() const;
  std::size_t num_leaves() const;
  std::size_t num_internal() const;
  /// Label of every leaf in depth-first order (a task may repeat).
  std::vector<std::size_t> leaf_labels() const;

  /// Follows the true branch iff means(task, arm) <= threshold.
  std::size_t descend(const MeanTable& means, std::size_t task) const;

  /// Indented text rendering of the plan.
  std::string render() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct Split {
  std::size_t arm = 0;
  double threshold = 0.0;
  std::size_t score = 0;
  double margin = 0.0;  // distance from b to the nearest member mean
};

/// Boundary tolerance for band membership and threshold comparisons.
inline constexpr double kBandSlack = 1e-9;

/// Greedy test on the threshold grid {0, lambda/4, ..., 1}: maximizes
/// min(#{mu <= b - lambda/2}, #{mu >= b + lambda/2}). Ties go to the lowest
/// arm, then to the threshold farthest from every member mean, then to the
/// lowest threshold. Empty when the best score is zero.
std::optional<Split> greedy_split(const MeanTable& means, const HypothesisSet& subset, double lambda);

/// Recursive soft-split construction: tasks strictly inside the band
/// (b - lambda/2, b + lambda/2) go to both children. Throws NoSplit or
/// NoProgress when the tasks are not separated at lambda.
DecisionTree build_tree(const MeanTable& means, double lambda);

/// Oracle-path check: descending with each task's own means lands on a leaf
/// labelled with that task.
bool oracle_paths_correct(const DecisionTree& tree, const MeanTable& means);

}  // namespace metaband
