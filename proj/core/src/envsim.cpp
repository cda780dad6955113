#include "metaband/envsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "metaband/complexity.hpp"
#include "metaband/error.hpp"
#include "metaband/hellinger.hpp"

namespace metaband {

namespace {

constexpr double kMeanSlack = 1e-12;
// Gaps this close to lambda count as equal, hence not strictly separated.
constexpr double kSeparationSlack = 1e-12;

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

ContextDistribution::ContextDistribution(std::vector<Vector> support, std::vector<double> weights,
                                         double l1_bound)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.empty()) throw InvalidArgument("context distribution: empty support");
  if (support_.size() != weights_.size()) {
    throw InvalidArgument("context distribution: support and weights differ in length");
  }
  const std::size_t d = support_.front().size();
  if (d == 0) throw InvalidArgument("context distribution: zero-dimensional context");
  double total = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i].size() != d) throw InvalidArgument("context distribution: mixed context dimensions");
    double l1 = 0.0;
    for (double v : support_[i]) l1 += std::abs(v);
    if (!(l1 <= l1_bound)) throw InvalidArgument("context distribution: context exceeds the l1 bound");
    if (!(weights_[i] >= 0.0)) throw InvalidArgument("context distribution: negative weight");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("context distribution: weights do not sum to 1");
}

std::size_t ContextDistribution::sample_index(Rng& rng) const {
  if (support_.size() == 1) return 0;
  return rng.categorical(weights_);
}

const Vector& sample_context(const ContextDistribution& dist, Rng& rng) {
  return dist.at(dist.sample_index(rng));
}

double BanditInstance::expected_reward(std::span<const double> x, std::size_t arm) const {
  return dot(x, theta[arm]);
}

RewardDist BanditInstance::reward_dist(std::span<const double> x, std::size_t arm) const {
  return {noise[arm], expected_reward(x, arm)};
}

double sample_reward(const BanditInstance& inst, std::span<const double> x, std::size_t arm, Rng& rng) {
  if (arm >= inst.num_arms()) throw InvalidArgument("sample_reward: arm index out of range");
  const double mean = inst.expected_reward(x, arm);
  const Noise& noise = inst.noise[arm];
  if (noise.kind == NoiseKind::bernoulli) return rng.bernoulli(mean) ? 1.0 : 0.0;
  if (noise.sigma == 0.0) return mean;
  return mean + noise.sigma * rng.normal();
}

BanditCollection::BanditCollection(std::vector<BanditInstance> instances, ContextDistribution context,
                                   double lambda)
    : instances_(std::move(instances)), context_(std::move(context)), lambda_(lambda) {
  if (instances_.empty()) throw InvalidArgument("collection: no instances");
  if (!(lambda_ > 0.0 && lambda_ < 1.0)) throw InvalidArgument("collection: lambda must lie in (0, 1)");
  const std::size_t k = instances_.front().num_arms();
  const std::size_t d = context_.dim();
  if (k == 0) throw InvalidArgument("collection: instances have no arms");
  for (const auto& inst : instances_) {
    if (inst.num_arms() != k) throw InvalidArgument("collection: instances disagree on K");
    if (inst.noise.size() != k) throw InvalidArgument("collection: one noise model per arm is required");
    for (const auto& th : inst.theta) {
      if (th.size() != d) throw InvalidArgument("collection: theta dimension differs from context dimension");
    }
    for (const auto& n : inst.noise) {
      if (n.kind == NoiseKind::gaussian && !(n.sigma >= 0.0)) {
        throw InvalidArgument("collection: negative Gaussian sigma");
      }
    }
  }

  const std::size_t m = instances_.size();
  means_.assign(m * k, 0.0);
  ctx_means_.assign(m * context_.size() * k, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < context_.size(); ++c) {
      for (std::size_t a = 0; a < k; ++a) {
        const double v = instances_[i].expected_reward(context_.at(c), a);
        if (!(v >= -kMeanSlack && v <= 1.0 + kMeanSlack)) {
          std::ostringstream os;
          os << "collection: task " << i << " arm " << a << " has x.theta = " << v << " outside [0, 1]";
          throw InvalidArgument(os.str());
        }
        ctx_means_[(i * context_.size() + c) * k + a] = v;
        means_[i * k + a] += context_.weights()[c] * v;
      }
    }
  }
}

std::size_t BanditCollection::best_arm_at(std::size_t task, std::size_t ctx) const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < num_arms(); ++a) {
    if (mean_at(task, ctx, a) > mean_at(task, ctx, best)) best = a;
  }
  return best;
}

std::size_t BanditCollection::optimal_arm(std::size_t task) const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < num_arms(); ++a) {
    if (mean(task, a) > mean(task, best)) best = a;
  }
  return best;
}

double BanditCollection::noise_scale() const {
  double s = 0.0;
  for (const auto& inst : instances_) {
    for (const auto& n : inst.noise) {
      s = std::max(s, n.kind == NoiseKind::bernoulli ? 0.5 : n.sigma);
    }
  }
  return s;
}

bool BanditCollection::all_bernoulli() const {
  for (const auto& inst : instances_) {
    for (const auto& n : inst.noise) {
      if (n.kind != NoiseKind::bernoulli) return false;
    }
  }
  return true;
}

double BanditCollection::min_action_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < num_tasks(); ++i) {
    for (std::size_t c = 0; c < context_.size(); ++c) {
      const std::size_t best = best_arm_at(i, c);
      for (std::size_t a = 0; a < num_arms(); ++a) {
        if (a == best) continue;
        gap = std::min(gap, mean_at(i, c, best) - mean_at(i, c, a));
      }
    }
  }
  return std::isinf(gap) ? 0.0 : std::max(gap, 0.0);
}

double mean_reward(const BanditCollection& coll, std::size_t task, std::size_t arm) {
  if (task >= coll.num_tasks() || arm >= coll.num_arms()) {
    throw InvalidArgument("mean_reward: index out of range");
  }
  return coll.mean(task, arm);
}

std::size_t code_bits(std::size_t m) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < m) ++bits;
  return bits;
}

BanditCollection make_hard(const HardParams& params, std::vector<std::string>* warnings) {
  const std::size_t m = params.num_tasks;
  const std::size_t k = params.num_arms;
  const double eps = params.epsilon;
  const double lambda = params.lambda;
  if (m == 0) throw InvalidArgument("make_hard: need at least one task");
  if (!(eps > 0.0)) throw InvalidArgument("make_hard: epsilon must be positive");
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("make_hard: lambda must lie in (0, 1)");
  // The best arm sits at 3/4 + 10 eps <= 1, and the high revealing mean
  // (1 + lambda) / 2 must stay at or below the decoys' 3/4 so that every
  // task keeps a unique best arm with gap >= 10 eps.
  if (0.75 + 10.0 * eps > 1.0) throw InvalidArgument("make_hard: epsilon above 1/40 pushes means past 1");
  if (lambda > 0.5) throw InvalidArgument("make_hard: lambda above 1/2 lets a revealing arm beat the decoys");

  const std::size_t bits = m > 1 ? code_bits(m) : 0;
  if (params.code == RevealCode::binary && k < m + bits) {
    throw InvalidArgument("make_hard: binary code needs K >= M + ceil(log2 M)");
  }
  if (k < m + (m > 1 ? 1 : 0)) throw InvalidArgument("make_hard: need K >= M + 1");

  const double high = (1.0 + lambda) / 2.0;
  const double low = (1.0 - lambda) / 2.0;
  std::vector<std::vector<double>> means(m, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < m; ++a) means[i][a] = (a == i) ? 0.75 + 10.0 * eps : 0.75;
  }
  if (params.code == RevealCode::binary) {
    for (std::size_t a = m; a < k; ++a) {
      const std::size_t bit = bits == 0 ? 0 : (a - m) % bits;
      for (std::size_t i = 0; i < m; ++i) means[i][a] = ((i >> bit) & 1U) ? low : high;
    }
  } else {
    Rng rng(params.seed, 0x68617264ULL);
    std::vector<std::size_t> order(m);
    for (std::size_t a = m; a < k; ++a) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t j = m; j > 1; --j) std::swap(order[j - 1], order[rng.index(j)]);
      for (std::size_t r = 0; r < m; ++r) means[order[r]][a] = (r < (m + 1) / 2) ? high : low;
    }
  }

  std::vector<BanditInstance> instances;
  instances.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    BanditInstance inst;
    for (std::size_t a = 0; a < k; ++a) inst.theta.push_back({means[i][a]});
    inst.noise.assign(k, Noise::bernoulli());
    instances.push_back(std::move(inst));
  }
  BanditCollection coll(std::move(instances), ContextDistribution::non_contextual(), lambda);

  if (warnings != nullptr && m > 1 && m <= 10) {
    const double level = hellinger_separation_level(coll);
    if (level > 0.0) {
      const auto c_rand = randomized_coefficient(coll, TestClass::all_arms(k), level, 1e-3);
      if (lambda * lambda <= 10.0 * eps * c_rand.value) {
        std::ostringstream os;
        os << "make_hard: lambda^2 = " << lambda * lambda << " <= 10 * eps * C~ = " << 10.0 * eps * c_rand.value;
        warnings->push_back(os.str());
      }
    }
  }
  return coll;
}

RandResult make_rand(std::size_t num_tasks, std::size_t num_arms, double lambda, Rng& rng,
                     std::size_t max_retries) {
  if (num_tasks == 0 || num_arms == 0) throw InvalidArgument("make_rand: need M >= 1 and K >= 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("make_rand: lambda must lie in (0, 1)");
  for (std::size_t attempt = 1; attempt <= max_retries; ++attempt) {
    std::vector<BanditInstance> instances(num_tasks);
    for (auto& inst : instances) {
      for (std::size_t a = 0; a < num_arms; ++a) inst.theta.push_back({rng.uniform(0.05, 0.95)});
      inst.noise.assign(num_arms, Noise::bernoulli());
    }
    BanditCollection coll(std::move(instances), ContextDistribution::non_contextual(), lambda);
    if (check_separation(coll, lambda).separated) return {std::move(coll), attempt};
  }
  throw SeparationUnsatisfiable("make_rand: no lambda-separated collection after " +
                                std::to_string(max_retries) + " draws");
}

SeparationReport check_separation(const BanditCollection& coll, double lambda) {
  SeparationReport report;
  for (std::size_t i = 0; i < coll.num_tasks(); ++i) {
    for (std::size_t j = i + 1; j < coll.num_tasks(); ++j) {
      bool found = false;
      for (std::size_t a = 0; a < coll.num_arms(); ++a) {
        if (std::abs(coll.mean(i, a) - coll.mean(j, a)) > lambda + kSeparationSlack) {
          report.witness.emplace(std::make_pair(i, j), a);
          found = true;
          break;
        }
      }
      if (!found) {
        report.separated = false;
        if (!report.failing_pair) report.failing_pair = std::make_pair(i, j);
      }
    }
  }
  return report;
}

bool check_hellinger_separation(const BanditCollection& coll, double lambda) {
  for (std::size_t i = 0; i < coll.num_tasks(); ++i) {
    for (std::size_t j = i + 1; j < coll.num_tasks(); ++j) {
      bool found = false;
      for (std::size_t a = 0; a < coll.num_arms() && !found; ++a) {
        found = reaches(arm_hellinger_sq(coll, i, j, a), lambda);
      }
      if (!found) return false;
    }
  }
  return true;
}

double hellinger_separation_level(const BanditCollection& coll) {
  double level = 1.0;
  for (std::size_t i = 0; i < coll.num_tasks(); ++i) {
    for (std::size_t j = i + 1; j < coll.num_tasks(); ++j) {
      double best = 0.0;
      for (std::size_t a = 0; a < coll.num_arms(); ++a) best = std::max(best, arm_hellinger_sq(coll, i, j, a));
      level = std::min(level, std::sqrt(best));
    }
  }
  return level;
}

double implied_hellinger_level(const BanditCollection& coll) {
  const double measured = hellinger_separation_level(coll);
  if (!coll.all_bernoulli()) return measured;
  const double lambda = coll.lambda();
  return std::min(measured, std::sqrt(1.0 - std::sqrt(1.0 - lambda * lambda)));
}

}  // namespace metaband
