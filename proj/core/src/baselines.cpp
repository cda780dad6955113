#include "metaband/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metaband/ece.hpp"
#include "metaband/error.hpp"

namespace metaband {

MucbState::MucbState(const BanditCollection& coll)
    : counts(coll.num_arms(), 0), sums(coll.num_arms(), 0.0), active(coll.num_tasks(), true) {}

double mucb_radius(std::size_t t, std::size_t num_tasks, std::size_t num_arms, std::size_t n) {
  const double tmk = static_cast<double>(t) * static_cast<double>(num_tasks) * static_cast<double>(num_arms);
  return std::sqrt(std::log(std::max(tmk, 1.0)) / (2.0 * static_cast<double>(std::max<std::size_t>(n, 1))));
}

std::size_t mucb_select_model(MucbState& state, const BanditCollection& coll, std::size_t t, std::size_t ctx) {
  if (t == 0) throw InvalidArgument("mucb: steps are counted from 1");
  const std::size_t m = coll.num_tasks();
  const std::size_t k = coll.num_arms();
  bool any = false;
  for (std::size_t i = 0; i < m; ++i) {
    bool ok = true;
    for (std::size_t a = 0; a < k && ok; ++a) {
      if (state.counts[a] == 0) continue;
      ok = std::abs(state.mean(a) - coll.mean(i, a)) <= mucb_radius(t, m, k, state.counts[a]);
    }
    state.active[i] = ok;
    any = any || ok;
  }
  if (!any) {
    std::fill(state.active.begin(), state.active.end(), true);
    ++state.resets;
  }
  std::size_t best = m;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    if (!state.active[i]) continue;
    const double v = coll.mean_at(i, ctx, coll.best_arm_at(i, ctx));
    if (v > best_value) best = i, best_value = v;
  }
  return best;
}

std::size_t mucb_step(MucbState& state, const BanditCollection& coll, std::size_t t, std::size_t ctx) {
  return coll.best_arm_at(mucb_select_model(state, coll, t, ctx), ctx);
}

void mucb_update(MucbState& state, std::size_t arm, double reward) {
  ++state.counts[arm];
  state.sums[arm] += reward;
  ++state.steps;
}

MtsState::MtsState(const BanditCollection& coll)
    : weights(coll.num_tasks(), 1.0 / static_cast<double>(coll.num_tasks())) {}

std::size_t mts_step(const MtsState& state, const BanditCollection& coll, Rng& rng, std::size_t ctx) {
  return coll.best_arm_at(rng.categorical(state.weights), ctx);
}

void mts_update(MtsState& state, const BanditCollection& coll, std::size_t arm, std::size_t ctx, double reward) {
  const std::size_t m = coll.num_tasks();
  const Sample obs{ctx, reward};
  std::vector<double> ll(m);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    ll[i] = state.weights[i] > 0.0 ? loglik(coll, i, arm, {&obs, 1}, false) : -std::numeric_limits<double>::infinity();
    top = std::max(top, ll[i]);
  }
  double total = 0.0;
  if (std::isfinite(top)) {
    for (std::size_t i = 0; i < m; ++i) {
      state.weights[i] *= std::exp(ll[i] - top);
      total += state.weights[i];
    }
  }
  if (!(total > 0.0)) {
    std::fill(state.weights.begin(), state.weights.end(), 1.0 / static_cast<double>(m));
    ++state.resets;
    return;
  }
  for (double& w : state.weights) w /= total;
}

Episode run_mucb(const BanditCollection& coll, std::size_t true_task, std::size_t horizon, Rng& rng) {
  if (true_task >= coll.num_tasks()) throw InvalidArgument("run_mucb: task out of range");
  Episode ep;
  ep.steps.reserve(horizon);
  MucbState state(coll);
  const auto& inst = coll.instance(true_task);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const std::size_t c = coll.context().sample_index(rng);
    const std::size_t arm = mucb_step(state, coll, t, c);
    const double r = sample_reward(inst, coll.context().at(c), arm, rng);
    mucb_update(state, arm, r);
    ep.steps.push_back({c, arm, r, Phase::play});
  }
  return ep;
}

Episode run_mts(const BanditCollection& coll, std::size_t true_task, std::size_t horizon, Rng& rng) {
  if (true_task >= coll.num_tasks()) throw InvalidArgument("run_mts: task out of range");
  Episode ep;
  ep.steps.reserve(horizon);
  MtsState state(coll);
  const auto& inst = coll.instance(true_task);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const std::size_t c = coll.context().sample_index(rng);
    const std::size_t arm = mts_step(state, coll, rng, c);
    const double r = sample_reward(inst, coll.context().at(c), arm, rng);
    mts_update(state, coll, arm, c, r);
    ep.steps.push_back({c, arm, r, Phase::play});
  }
  return ep;
}

}  // namespace metaband
