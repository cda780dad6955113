#include "metaband/hellinger.hpp"

#include <algorithm>
#include <cmath>

#include "metaband/error.hpp"

namespace metaband {

double bernoulli_hellinger_sq(double a, double b) {
  a = std::clamp(a, 0.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  const double bc = std::sqrt(a * b) + std::sqrt((1.0 - a) * (1.0 - b));
  return std::clamp(1.0 - bc, 0.0, 1.0);
}

double gaussian_hellinger_sq(double mean1, double sigma1, double mean2, double sigma2) {
  const double var_sum = sigma1 * sigma1 + sigma2 * sigma2;
  if (var_sum == 0.0) return mean1 == mean2 ? 0.0 : 1.0;
  const double d = mean1 - mean2;
  const double bc = std::sqrt(2.0 * sigma1 * sigma2 / var_sum) * std::exp(-d * d / (4.0 * var_sum));
  return std::clamp(1.0 - bc, 0.0, 1.0);
}

double hellinger_sq(const RewardDist& p, const RewardDist& q) {
  if (p.noise.kind != q.noise.kind) {
    throw InvalidArgument("hellinger_sq: reward distributions belong to different families");
  }
  if (p.noise.kind == NoiseKind::bernoulli) return bernoulli_hellinger_sq(p.mean, q.mean);
  return gaussian_hellinger_sq(p.mean, p.noise.sigma, q.mean, q.noise.sigma);
}

double arm_hellinger_sq(const BanditCollection& coll, std::size_t i, std::size_t j, std::size_t arm) {
  // For a shared context law the joint Bhattacharyya coefficient is the
  // P-average of the per-context coefficients.
  const auto& ctx = coll.context();
  double total = 0.0;
  for (std::size_t c = 0; c < ctx.size(); ++c) {
    const auto p = coll.instance(i).reward_dist(ctx.at(c), arm);
    const auto q = coll.instance(j).reward_dist(ctx.at(c), arm);
    total += ctx.weights()[c] * hellinger_sq(p, q);
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace metaband
