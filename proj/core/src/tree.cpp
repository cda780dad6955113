#include "metaband/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "metaband/error.hpp"

namespace metaband {

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  // Children are always appended after their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    best = std::max(best, d[i]);
    if (n.is_leaf) continue;
    d[static_cast<std::size_t>(n.true_child)] = d[i] + 1;
    d[static_cast<std::size_t>(n.false_child)] = d[i] + 1;
  }
  return best;
}

std::size_t DecisionTree::num_leaves() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf; }));
}

std::size_t DecisionTree::num_internal() const { return nodes_.size() - num_leaves(); }

std::vector<std::size_t> DecisionTree::leaf_labels() const {
  std::vector<std::size_t> out;
  if (nodes_.empty()) return out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const TreeNode& n = nodes_[stack.back()];
    stack.pop_back();
    if (n.is_leaf) {
      out.push_back(n.task);
    } else {
      stack.push_back(static_cast<std::size_t>(n.false_child));
      stack.push_back(static_cast<std::size_t>(n.true_child));
    }
  }
  return out;
}

std::size_t DecisionTree::descend(const MeanTable& means, std::size_t task) const {
  if (nodes_.empty()) throw InvalidArgument("descend: empty tree");
  std::size_t idx = 0;
  while (!nodes_[idx].is_leaf) {
    const TreeNode& n = nodes_[idx];
    idx = static_cast<std::size_t>(means(task, n.arm) <= n.threshold ? n.true_child : n.false_child);
  }
  return nodes_[idx].task;
}

std::string DecisionTree::render() const {
  std::ostringstream os;
  if (nodes_.empty()) return "(empty tree)\n";
  auto tasks_str = [](const std::vector<std::size_t>& t) {
    std::ostringstream s;
    s << '{';
    for (std::size_t i = 0; i < t.size(); ++i) s << (i ? "," : "") << t[i];
    s << '}';
    return s.str();
  };
  auto walk = [&](auto&& self, std::size_t idx, const std::string& prefix, const std::string& label) -> void {
    const TreeNode& n = nodes_[idx];
    os << prefix << label;
    if (n.is_leaf) {
      os << "task " << n.task << '\n';
      return;
    }
    os << "pull arm " << n.arm << ": mean <= " << n.threshold << "?  (band +-" << n.lambda / 2.0 << ", tasks "
       << tasks_str(n.tasks) << ")\n";
    const std::string child_prefix = prefix + (label.empty() ? "" : label[0] == '|' ? "|   " : "    ");
    self(self, static_cast<std::size_t>(n.true_child), child_prefix, "|-- yes: ");
    self(self, static_cast<std::size_t>(n.false_child), child_prefix, "`-- no:  ");
  };
  walk(walk, 0, "", "");
  return os.str();
}

std::optional<Split> greedy_split(const MeanTable& means, const HypothesisSet& subset, double lambda) {
  if (subset.size() < 2) throw InvalidArgument("greedy_split: need at least two tasks");
  if (!(lambda > 0.0)) throw InvalidArgument("greedy_split: lambda must be positive");

  std::vector<double> grid;
  const double step = lambda / 4.0;
  for (std::size_t j = 0;; ++j) {
    const double b = static_cast<double>(j) * step;
    if (b > 1.0 + kBandSlack) break;
    grid.push_back(std::min(b, 1.0));
  }
  if (grid.back() < 1.0) grid.push_back(1.0);

  const double half = lambda / 2.0;
  std::optional<Split> best;
  for (std::size_t arm = 0; arm < means.arms; ++arm) {
    for (double b : grid) {
      std::size_t low = 0;
      std::size_t high = 0;
      double margin = std::numeric_limits<double>::infinity();
      for (std::size_t i : subset) {
        const double mu = means(i, arm);
        if (mu <= b - half + kBandSlack) ++low;
        if (mu >= b + half - kBandSlack) ++high;
        margin = std::min(margin, std::abs(mu - b));
      }
      const std::size_t score = std::min(low, high);
      if (score == 0) continue;
      const bool better = !best || score > best->score ||
                          (score == best->score && arm == best->arm && margin > best->margin + kBandSlack);
      if (better) best = Split{arm, b, score, margin};
    }
  }
  return best;
}

namespace {

int grow(std::vector<TreeNode>& nodes, const MeanTable& means, const HypothesisSet& subset, double lambda) {
  const int idx = static_cast<int>(nodes.size());
  nodes.emplace_back();
  nodes.back().tasks = subset.members();
  if (subset.size() == 1) {
    nodes.back().task = subset.members().front();
    return idx;
  }

  const auto split = greedy_split(means, subset, lambda);
  if (!split) throw NoSplit("build_tree: no lambda-separating split for tasks of size " + std::to_string(subset.size()));

  const double half = lambda / 2.0;
  std::vector<std::size_t> on_true;
  std::vector<std::size_t> on_false;
  for (std::size_t i : subset) {
    const double mu = means(i, split->arm);
    if (mu < split->threshold + half - kBandSlack) on_true.push_back(i);
    if (mu > split->threshold - half + kBandSlack) on_false.push_back(i);
  }
  if (on_true.size() == subset.size() || on_false.size() == subset.size()) {
    throw NoProgress("build_tree: split on arm " + std::to_string(split->arm) + " leaves a child unchanged");
  }

  TreeNode& node = nodes[static_cast<std::size_t>(idx)];
  node.is_leaf = false;
  node.arm = split->arm;
  node.threshold = split->threshold;
  node.lambda = lambda;
  const int t = grow(nodes, means, HypothesisSet(std::move(on_true)), lambda);
  const int f = grow(nodes, means, HypothesisSet(std::move(on_false)), lambda);
  nodes[static_cast<std::size_t>(idx)].true_child = t;
  nodes[static_cast<std::size_t>(idx)].false_child = f;
  return idx;
}

}  // namespace

DecisionTree build_tree(const MeanTable& means, double lambda) {
  if (means.tasks == 0) throw InvalidArgument("build_tree: no tasks");
  std::vector<TreeNode> nodes;
  grow(nodes, means, HypothesisSet::full(means.tasks), lambda);
  return DecisionTree(std::move(nodes));
}

bool oracle_paths_correct(const DecisionTree& tree, const MeanTable& means) {
  for (std::size_t i = 0; i < means.tasks; ++i) {
    if (tree.descend(means, i) != i) return false;
  }
  return true;
}

}  // namespace metaband
