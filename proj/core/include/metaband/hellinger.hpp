#pragma once

#include <cstddef>

#include "metaband/envsim.hpp"

namespace metaband {

// Convention: hellinger_sq(p, q) := 1 - BC(p, q), where BC is the
// Bhattacharyya coefficient. It lies in [0, 1] and is zero iff p == q.
// Every "distance at least lambda" test in the library is evaluated as
// hellinger_sq >= lambda^2.

double bernoulli_hellinger_sq(double a, double b);
double gaussian_hellinger_sq(double mean1, double sigma1, double mean2, double sigma2);

/// Throws InvalidArgument when the two laws belong to different families.
double hellinger_sq(const RewardDist& p, const RewardDist& q);

/// Hellinger quantity between the joint (context, reward) laws of tasks i
/// and j when `arm` is pulled at every context.
double arm_hellinger_sq(const BanditCollection& coll, std::size_t i, std::size_t j, std::size_t arm);

/// Absolute slack applied to every ">= lambda^2" comparison.
inline constexpr double kThresholdSlack = 1e-12;

inline bool reaches(double hellinger, double lambda) {
  return hellinger >= lambda * lambda - kThresholdSlack;
}

}  // namespace metaband
