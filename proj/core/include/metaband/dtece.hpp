#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "metaband/envsim.hpp"
#include "metaband/metatrain.hpp"
#include "metaband/rng.hpp"
#include "metaband/trajectory.hpp"
#include "metaband/tree.hpp"

namespace metaband {

struct DtEceConfig {
  std::optional<std::size_t> n_cls;
  std::size_t horizon = 10000;
  /// Separation level in the n_cls formula; defaults to the root's band level.
  std::optional<double> lambda;
  /// Use 2 ln(2 H D) / lambda^2 instead of the default 2 ln(8 H D) / lambda^2.
  bool short_constant = false;
};

/// Per-node sample count for a tree of depth `depth` (1 when depth is 0).
std::size_t default_dtece_n_cls(std::size_t horizon, std::size_t depth, double lambda, bool short_constant = false);

struct DtEceResult {
  Episode episode;
  std::vector<std::size_t> path;  // visited node indices, root first
  std::size_t n_cls = 0;
};

/// Walks the tree with empirical means of n_cls pulls per node against the
/// true task, then plays the estimated best arm of the leaf's task.
DtEceResult run_dtece(const BanditCollection& coll, std::size_t true_task, const DecisionTree& tree,
                      const EstimatedCollection& est, const DtEceConfig& cfg, Rng& rng);

/// Expected gap of `arm` at support context `ctx` for `task`.
double pseudo_regret_step(const BanditCollection& coll, std::size_t task, std::size_t ctx, std::size_t arm);

}  // namespace metaband
