#include "metaband/dtece.hpp"

#include <cmath>

#include "metaband/error.hpp"

namespace metaband {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::classify:
      return "classify";
    case Phase::exploit:
      return "exploit";
    case Phase::play:
      return "play";
  }
  return "play";
}

std::size_t default_dtece_n_cls(std::size_t horizon, std::size_t depth, double lambda, bool short_constant) {
  if (!(lambda > 0.0)) throw InvalidArgument("n_cls: lambda must be positive");
  if (depth == 0) return 1;
  const double c = short_constant ? 2.0 : 8.0;
  const double n = 2.0 * std::log(c * static_cast<double>(horizon) * static_cast<double>(depth)) / (lambda * lambda);
  return static_cast<std::size_t>(std::ceil(std::max(n, 1.0)));
}

double pseudo_regret_step(const BanditCollection& coll, std::size_t task, std::size_t ctx, std::size_t arm) {
  const std::size_t best = coll.best_arm_at(task, ctx);
  return coll.mean_at(task, ctx, best) - coll.mean_at(task, ctx, arm);
}

DtEceResult run_dtece(const BanditCollection& coll, std::size_t true_task, const DecisionTree& tree,
                      const EstimatedCollection& est, const DtEceConfig& cfg, Rng& rng) {
  if (true_task >= coll.num_tasks()) throw InvalidArgument("run_dtece: task out of range");
  if (tree.empty()) throw InvalidArgument("run_dtece: empty tree");
  if (est.arms != coll.num_arms() || est.dim != coll.dim()) {
    throw InvalidArgument("run_dtece: estimate does not match the collection");
  }

  DtEceResult out;
  const double lambda = cfg.lambda.value_or(tree.root().is_leaf ? 1.0 : tree.root().lambda);
  out.n_cls = cfg.n_cls.value_or(default_dtece_n_cls(cfg.horizon, tree.depth(), lambda, cfg.short_constant));
  if (out.n_cls == 0) throw InvalidArgument("run_dtece: n_cls must be positive");

  Episode& ep = out.episode;
  ep.steps.reserve(cfg.horizon);
  const auto& inst = coll.instance(true_task);
  const auto& ctx_dist = coll.context();

  std::size_t idx = 0;
  out.path.push_back(idx);
  while (!tree.node(idx).is_leaf) {
    const TreeNode& node = tree.node(idx);
    double sum = 0.0;
    for (std::size_t n = 0; n < out.n_cls; ++n) {
      const std::size_t c = ctx_dist.sample_index(rng);
      const double r = sample_reward(inst, ctx_dist.at(c), node.arm, rng);
      sum += r;
      if (ep.steps.size() < cfg.horizon) ep.steps.push_back({c, node.arm, r, Phase::classify});
      ++ep.classification_pulls;
    }
    const double mean = sum / static_cast<double>(out.n_cls);
    idx = static_cast<std::size_t>(mean <= node.threshold ? node.true_child : node.false_child);
    out.path.push_back(idx);
  }
  ep.classified = tree.node(idx).task;
  ep.truncated = ep.classification_pulls > cfg.horizon;

  while (ep.steps.size() < cfg.horizon) {
    const std::size_t c = ctx_dist.sample_index(rng);
    const auto& x = ctx_dist.at(c);
    const std::size_t arm = est.best_arm(ep.classified, x);
    ep.steps.push_back({c, arm, sample_reward(inst, x, arm, rng), Phase::exploit});
  }
  return out;
}

}  // namespace metaband
