#include "metaband/metatrain.hpp"

#include <cmath>

#include "metaband/error.hpp"

namespace metaband {

std::vector<std::unique_ptr<Simulator>> simulators_for(const BanditCollection& coll) {
  std::vector<std::unique_ptr<Simulator>> sims;
  for (std::size_t i = 0; i < coll.num_tasks(); ++i) sims.push_back(std::make_unique<CollectionSimulator>(coll, i));
  return sims;
}

std::size_t EstimatedCollection::best_arm(std::size_t task, std::span<const double> x) const {
  std::size_t best = 0;
  double best_value = dot(x, theta_hat(task, 0));
  for (std::size_t a = 1; a < arms; ++a) {
    const double v = dot(x, theta_hat(task, a));
    if (v > best_value) best = a, best_value = v;
  }
  return best;
}

void EstimatedCollection::validate() const {
  if (tasks == 0 || arms == 0 || dim == 0) throw InvalidArgument("estimate: empty dimensions");
  if (theta.size() != tasks * arms || mu.size() != tasks * arms) {
    throw InvalidArgument("estimate: table sizes do not match tasks x arms");
  }
  for (const auto& th : theta) {
    if (th.size() != dim) throw InvalidArgument("estimate: theta dimension mismatch");
  }
  for (double v : mu) {
    if (!(v >= -0.5 && v <= 1.5)) throw InvalidArgument("estimate: mu_hat outside the [-0.5, 1.5] sanity band");
  }
}

EstimatedCollection exact_estimate(const BanditCollection& coll) {
  EstimatedCollection est;
  est.tasks = coll.num_tasks();
  est.arms = coll.num_arms();
  est.dim = coll.dim();
  for (std::size_t i = 0; i < est.tasks; ++i) {
    for (std::size_t a = 0; a < est.arms; ++a) {
      est.theta.push_back(coll.instance(i).theta[a]);
      est.mu.push_back(coll.mean(i, a));
    }
  }
  return est;
}

std::size_t n_est_formula(double sigma, std::size_t dim, std::size_t horizon, std::size_t num_tasks,
                          std::size_t num_arms, double gap, double lambda) {
  if (!(sigma > 0.0) || dim == 0 || horizon == 0 || num_tasks == 0 || num_arms == 0) {
    throw InvalidArgument("n_est_formula: all inputs must be positive");
  }
  if (!(gap > 0.0)) throw InvalidArgument("n_est_formula: action gap must be positive");
  if (!(lambda > 0.0)) throw InvalidArgument("n_est_formula: lambda must be positive");
  const double hmk = 4.0 * static_cast<double>(horizon) * static_cast<double>(num_tasks) * static_cast<double>(num_arms);
  const double denom = std::min(gap * gap, lambda * lambda);
  const double n = 160.0 * sigma * sigma * static_cast<double>(dim) * std::log(hmk) / denom;
  return static_cast<std::size_t>(std::ceil(n));
}

MetaTrainResult meta_train(std::span<const std::unique_ptr<Simulator>> simulators, const MetaTrainConfig& cfg) {
  if (simulators.empty()) throw InvalidArgument("meta_train: no simulators");
  const std::size_t m = simulators.size();
  const std::size_t k = simulators.front()->num_arms();
  const std::size_t d = simulators.front()->dim();
  for (const auto& s : simulators) {
    if (s->num_arms() != k || s->dim() != d) throw InvalidArgument("meta_train: simulators disagree on K or d");
  }

  MetaTrainResult out;
  out.n_est = cfg.n_est ? *cfg.n_est : n_est_formula(cfg.sigma, d, cfg.horizon, m, k, cfg.gap, cfg.lambda);
  out.n_est = std::max(out.n_est, d);

  EstimatedCollection& est = out.estimate;
  est.tasks = m;
  est.arms = k;
  est.dim = d;
  est.n_est = out.n_est;
  est.seed = cfg.seed;
  est.theta.resize(m * k);
  est.mu.resize(m * k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      Rng rng(cfg.seed, i * k + a);
      ArmEstimate e = estimate_task_arm(*simulators[i], a, out.n_est, rng);
      est.theta[i * k + a] = std::move(e.theta);
      est.mu[i * k + a] = e.mu;
    }
  }
  out.total_samples = static_cast<std::uint64_t>(m) * k * out.n_est;
  est.validate();
  out.lambda = cfg.lambda;
  out.tree_lambda = cfg.tree_lambda.value_or(cfg.lambda / 2.0);
  out.tree = build_tree(est.mean_table(), out.tree_lambda);
  return out;
}

}  // namespace metaband
