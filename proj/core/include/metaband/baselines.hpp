#pragma once

#include <cstddef>
#include <vector>

#include "metaband/envsim.hpp"
#include "metaband/rng.hpp"
#include "metaband/trajectory.hpp"

namespace metaband {

/// Latent-bandit UCB over a known model set.
struct MucbState {
  std::vector<std::size_t> counts;  // per arm
  std::vector<double> sums;         // per arm
  std::vector<bool> active;         // models consistent at the last step
  std::size_t steps = 0;
  std::size_t resets = 0;

  explicit MucbState(const BanditCollection& coll);
  double mean(std::size_t arm) const { return sums[arm] / static_cast<double>(counts[arm]); }
};

/// sqrt(ln(t M K) / (2 max(n, 1)))
double mucb_radius(std::size_t t, std::size_t num_tasks, std::size_t num_arms, std::size_t n);

/// Refreshes the active set for step t >= 1 and returns the model whose
/// optimal value at `ctx` is highest among active ones (lowest index on ties).
std::size_t mucb_select_model(MucbState& state, const BanditCollection& coll, std::size_t t, std::size_t ctx);
std::size_t mucb_step(MucbState& state, const BanditCollection& coll, std::size_t t, std::size_t ctx = 0);
void mucb_update(MucbState& state, std::size_t arm, double reward);

/// Thompson sampling over a known model set with exact likelihoods.
struct MtsState {
  std::vector<double> weights;
  std::size_t resets = 0;

  explicit MtsState(const BanditCollection& coll);
};

std::size_t mts_step(const MtsState& state, const BanditCollection& coll, Rng& rng, std::size_t ctx = 0);
void mts_update(MtsState& state, const BanditCollection& coll, std::size_t arm, std::size_t ctx, double reward);

Episode run_mucb(const BanditCollection& coll, std::size_t true_task, std::size_t horizon, Rng& rng);
Episode run_mts(const BanditCollection& coll, std::size_t true_task, std::size_t horizon, Rng& rng);

}  // namespace metaband
