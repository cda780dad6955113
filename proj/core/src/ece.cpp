#include "metaband/ece.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "metaband/error.hpp"
#include "metaband/hellinger.hpp"

namespace metaband {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

double sample_loglik(const RewardDist& d, double reward, bool clamp) {
  if (d.noise.kind == NoiseKind::bernoulli) {
    double mu = d.mean;
    if (clamp) mu = std::clamp(mu, kLikelihoodClamp, 1.0 - kLikelihoodClamp);
    return reward >= 0.5 ? safe_log(mu) : safe_log(1.0 - mu);
  }
  const double sigma = d.noise.sigma;
  if (sigma == 0.0) return reward == d.mean ? 0.0 : kNegInf;
  const double z = (reward - d.mean) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double expected_sample_loglik(const RewardDist& model, const RewardDist& truth, bool clamp) {
  if (model.noise.kind == NoiseKind::bernoulli) {
    double mu = model.mean;
    if (clamp) mu = std::clamp(mu, kLikelihoodClamp, 1.0 - kLikelihoodClamp);
    const double p = truth.mean;
    double v = 0.0;
    if (p > 0.0) v += p * safe_log(mu);
    if (p < 1.0) v += (1.0 - p) * safe_log(1.0 - mu);
    return v;
  }
  const double sigma = model.noise.sigma;
  const double d = truth.mean - model.mean;
  if (sigma == 0.0) return (d == 0.0 && truth.noise.sigma == 0.0) ? 0.0 : kNegInf;
  const double st = truth.noise.kind == NoiseKind::gaussian ? truth.noise.sigma : 0.0;
  return -(st * st + d * d) / (2.0 * sigma * sigma) - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace

std::size_t default_ece_n_cls(std::size_t num_tasks, double delta, double lambda) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("ece: delta must lie in (0, 1)");
  if (!(lambda > 0.0)) throw InvalidArgument("ece: lambda must be positive");
  const double beta = std::log(static_cast<double>(num_tasks) / delta);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * beta / (lambda * lambda))));
}

std::size_t default_max_rounds(std::size_t num_tasks, double delta) {
  const double beta = std::log(static_cast<double>(num_tasks) / delta);
  return num_tasks * static_cast<std::size_t>(std::ceil(beta)) + 1;
}

std::size_t greedy_test(const HypothesisSet& subset, const SeparationTable& table, const TestClass& tests) {
  if (subset.size() < 2) throw InvalidArgument("greedy_test: need at least two hypotheses");
  const TaskMask s = subset.mask();
  std::size_t best_arm = 0;
  std::size_t best_value = 0;
  bool found = false;
  for (std::size_t a : tests.arms) {
    std::size_t worst = SIZE_MAX;
    for (std::size_t i : subset) {
      worst = std::min(worst, static_cast<std::size_t>(std::popcount(s & table.separated(a, i))));
    }
    if (!found || worst > best_value) {
      best_arm = a;
      best_value = worst;
      found = true;
    }
  }
  if (best_value == 0) throw NoSeparatingTest("greedy_test: no test eliminates a hypothesis for every member");
  return best_arm;
}

std::size_t greedy_test(const HypothesisSet& subset, const BanditCollection& coll, const TestClass& tests,
                        double lambda) {
  return greedy_test(subset, SeparationTable(coll, lambda), tests);
}

double loglik(const BanditCollection& coll, std::size_t task, std::size_t arm, std::span<const Sample> samples,
              bool clamp) {
  if (samples.empty()) throw InvalidArgument("loglik: no samples");
  const auto& inst = coll.instance(task);
  double total = 0.0;
  for (const Sample& s : samples) {
    total += sample_loglik(inst.reward_dist(coll.context().at(s.context), arm), s.reward, clamp);
    if (total == kNegInf) break;
  }
  return total;
}

double expected_loglik(const BanditCollection& coll, std::size_t task, std::size_t true_task, std::size_t arm,
                       std::size_t n, bool clamp) {
  const auto& ctx = coll.context();
  double per_sample = 0.0;
  for (std::size_t c = 0; c < ctx.size(); ++c) {
    const auto model = coll.instance(task).reward_dist(ctx.at(c), arm);
    const auto truth = coll.instance(true_task).reward_dist(ctx.at(c), arm);
    per_sample += ctx.weights()[c] * expected_sample_loglik(model, truth, clamp);
  }
  return static_cast<double>(n) * per_sample;
}

HypothesisSet survivors(const HypothesisSet& subset, std::span<const double> logliks, std::size_t num_tasks,
                        double delta) {
  const double slack = 3.0 * std::log(static_cast<double>(num_tasks) / delta);
  std::size_t best = 0;
  for (std::size_t j = 1; j < logliks.size(); ++j) {
    if (logliks[j] > logliks[best]) best = j;
  }
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < logliks.size(); ++j) {
    if (j == best || logliks[j] >= logliks[best] - slack) keep.push_back(subset.members()[j]);
  }
  return HypothesisSet(std::move(keep));
}

HypothesisSet update_hypotheses(const HypothesisSet& subset, std::size_t arm, std::span<const Sample> samples,
                                const BanditCollection& coll, double delta, bool clamp) {
  if (subset.size() < 2) throw InvalidArgument("update_hypotheses: need at least two hypotheses");
  std::vector<double> ll;
  ll.reserve(subset.size());
  for (std::size_t i : subset) ll.push_back(loglik(coll, i, arm, samples, clamp));
  return survivors(subset, ll, coll.num_tasks(), delta);
}

EceResult run_ece(const BanditCollection& coll, std::size_t true_task, const EceConfig& cfg, std::size_t horizon,
                  Rng& rng) {
  const std::size_t m = coll.num_tasks();
  if (true_task >= m) throw InvalidArgument("run_ece: true task out of range");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidArgument("run_ece: delta must lie in (0, 1)");

  EceResult result;
  Episode& ep = result.episode;
  ep.steps.reserve(horizon);
  HypothesisSet current = HypothesisSet::full(m);

  if (m > 1) {
    if (!(cfg.lambda > 0.0)) throw InvalidArgument("run_ece: lambda must be positive");
    if (!check_hellinger_separation(coll, cfg.lambda)) {
      throw InvalidArgument("run_ece: collection is not Hellinger-separated at the configured lambda");
    }
    const TestClass tests = cfg.tests.arms.empty() ? TestClass::all_arms(coll.num_arms()) : cfg.tests;
    const SeparationTable table(coll, cfg.lambda);
    const std::size_t n_cls = cfg.n_cls.value_or(default_ece_n_cls(m, cfg.delta, cfg.lambda));
    const std::size_t max_rounds = cfg.max_rounds.value_or(default_max_rounds(m, cfg.delta));
    result.n_cls = n_cls;

    std::size_t round = 0;
    while (current.size() > 1) {
      if (round == max_rounds) {
        throw MaxRoundsExceeded("run_ece: " + std::to_string(current.size()) + " hypotheses left after " +
                                std::to_string(max_rounds) + " rounds");
      }
      RoundLog log;
      log.round = round;
      log.before = current;
      log.arm = greedy_test(current, table, tests);

      log.samples.reserve(n_cls);
      for (std::size_t n = 0; n < n_cls; ++n) {
        const std::size_t c = coll.context().sample_index(rng);
        const double r = cfg.oracle ? coll.mean_at(true_task, c, log.arm)
                                    : sample_reward(coll.instance(true_task), coll.context().at(c), log.arm, rng);
        log.samples.push_back({c, r});
        if (ep.steps.size() < horizon) ep.steps.push_back({c, log.arm, r, Phase::classify});
      }
      ep.classification_pulls += n_cls;

      for (std::size_t i : current) {
        log.logliks.push_back(cfg.oracle ? expected_loglik(coll, i, true_task, log.arm, n_cls, cfg.clamp)
                                         : loglik(coll, i, log.arm, log.samples, cfg.clamp));
      }
      log.after = survivors(current, log.logliks, m, cfg.delta);
      current = log.after;
      result.rounds.push_back(std::move(log));
      ++round;
    }
  }

  ep.classified = current.members().front();
  ep.truncated = ep.classification_pulls > horizon;
  while (ep.steps.size() < horizon) {
    const std::size_t c = coll.context().sample_index(rng);
    const std::size_t arm = coll.best_arm_at(ep.classified, c);
    const double r = cfg.oracle ? coll.mean_at(true_task, c, arm)
                                : sample_reward(coll.instance(true_task), coll.context().at(c), arm, rng);
    ep.steps.push_back({c, arm, r, Phase::exploit});
  }
  return result;
}

}  // namespace metaband
