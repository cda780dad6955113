#include <Eigen/Dense>
#include <cmath>

#include "metaband/error.hpp"
#include "metaband/metatrain.hpp"

namespace metaband {

ArmEstimate estimate_task_arm(const Simulator& sim, std::size_t arm, std::size_t n_est, Rng& rng) {
  const std::size_t d = sim.dim();
  if (arm >= sim.num_arms()) throw InvalidArgument("estimate_task_arm: arm out of range");
  if (n_est < d || n_est == 0) throw InvalidArgument("estimate_task_arm: need n_est >= d");

  // Accumulate X X' (d x d) and X r without storing the design matrix.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Eigen::VectorXd xr = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  double reward_sum = 0.0;
  for (std::size_t n = 0; n < n_est; ++n) {
    const Vector& x = sim.sample_context(rng);
    const double r = sim.sample_reward(x, arm, rng);
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(d));
    gram.noalias() += xv * xv.transpose();
    xr.noalias() += r * xv;
    reward_sum += r;
  }
  gram.diagonal().array() += kRidge;
  const Eigen::VectorXd theta = gram.ldlt().solve(xr);

  ArmEstimate est;
  est.theta.assign(theta.data(), theta.data() + theta.size());
  est.mu = reward_sum / static_cast<double>(n_est);
  return est;
}

}  // namespace metaband
