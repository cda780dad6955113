#include "metaband/dec.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "metaband/error.hpp"
#include "metaband/hellinger.hpp"

namespace metaband {

DecInstance DecInstance::from_collection(const BanditCollection& coll, double gamma) {
  DecInstance inst;
  inst.tasks = coll.num_tasks();
  inst.arms = coll.num_arms();
  inst.gamma = gamma;
  inst.gaps.resize(inst.tasks * inst.arms);
  inst.hellinger.assign(inst.tasks * inst.tasks * inst.arms, 0.0);
  for (std::size_t i = 0; i < inst.tasks; ++i) {
    const double best = coll.optimal_value(i);
    for (std::size_t k = 0; k < inst.arms; ++k) inst.gaps[i * inst.arms + k] = best - coll.mean(i, k);
    for (std::size_t m = 0; m < inst.tasks; ++m) {
      if (m == i) continue;
      for (std::size_t k = 0; k < inst.arms; ++k) {
        inst.hellinger[(i * inst.tasks + m) * inst.arms + k] = arm_hellinger_sq(coll, i, m, k);
      }
    }
  }
  inst.validate();
  return inst;
}

void DecInstance::validate() const {
  if (tasks == 0 || arms == 0) throw InvalidArgument("dec: empty instance");
  if (gaps.size() != tasks * arms || hellinger.size() != tasks * tasks * arms) {
    throw InvalidArgument("dec: table sizes do not match tasks/arms");
  }
  if (!(gamma >= 0.0)) throw InvalidArgument("dec: gamma must be nonnegative");
  for (std::size_t i = 0; i < tasks; ++i) {
    bool has_zero = false;
    for (std::size_t k = 0; k < arms; ++k) {
      if (gap(i, k) < -1e-12) throw InvalidArgument("dec: negative action gap");
      has_zero = has_zero || std::abs(gap(i, k)) <= 1e-12;
    }
    if (!has_zero) throw InvalidArgument("dec: every task needs an arm with zero gap");
    for (std::size_t m = 0; m < tasks; ++m) {
      for (std::size_t k = 0; k < arms; ++k) {
        if (m == i && dist(i, m, k) != 0.0) throw InvalidArgument("dec: Hellinger diagonal must be zero");
        if (std::abs(dist(i, m, k) - dist(m, i, k)) > 1e-12) throw InvalidArgument("dec: Hellinger table not symmetric");
      }
    }
  }
}

std::vector<std::vector<double>> simplex_grid(std::size_t parts, std::size_t divisions) {
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> counts(parts, 0);
  const auto d = static_cast<double>(divisions);
  std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t pos, std::size_t left) {
    if (pos + 1 == parts) {
      counts[pos] = left;
      std::vector<double> p(parts);
      for (std::size_t i = 0; i < parts; ++i) p[i] = static_cast<double>(counts[i]) / d;
      out.push_back(std::move(p));
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[pos] = c;
      fill(pos + 1, left - c);
    }
  };
  if (parts > 0) fill(0, divisions);
  return out;
}

Matrix dec_payoff(const DecInstance& inst, const std::vector<double>& omega) {
  Matrix a(inst.tasks, inst.arms);
  for (std::size_t i = 0; i < inst.tasks; ++i) {
    for (std::size_t k = 0; k < inst.arms; ++k) {
      double info = 0.0;
      for (std::size_t m = 0; m < inst.tasks; ++m) info += omega[m] * inst.dist(i, m, k);
      a(i, k) = inst.gap(i, k) - inst.gamma * info;
    }
  }
  return a;
}

DecResult dec_coefficient(const DecInstance& inst, double grid_step, const GameOptions& options) {
  inst.validate();
  if (inst.tasks > kMaxDecTasks) {
    throw InvalidArgument("dec_coefficient: prior grid limited to M <= " + std::to_string(kMaxDecTasks));
  }
  if (!(grid_step > 0.0 && grid_step <= 1.0)) throw InvalidArgument("dec_coefficient: grid step must lie in (0, 1]");
  const auto divisions = static_cast<std::size_t>(std::llround(1.0 / grid_step));

  DecResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const auto& omega : simplex_grid(inst.tasks, divisions)) {
    const GameSolution sol = solve_zero_sum(dec_payoff(inst, omega), options);
    if (sol.value > best.value) {
      best.value = sol.value;
      best.omega = omega;
      best.pi = sol.col;
    }
  }
  return best;
}

DecScan dec_threshold_scan(const BanditCollection& coll, double epsilon, double lambda,
                           const std::vector<double>& gamma_grid, double grid_step) {
  if (!(epsilon > 0.0)) throw InvalidArgument("dec_threshold_scan: epsilon must be positive");
  if (coll.num_tasks() > kMaxDecTasks) throw InvalidArgument("dec_threshold_scan: M <= 4 required");
  DecScan scan;
  scan.epsilon = epsilon;
  scan.lambda = lambda;
  DecInstance inst = DecInstance::from_collection(coll, 0.0);
  for (double gamma : gamma_grid) {
    inst.gamma = gamma;
    const double value = dec_coefficient(inst, grid_step).value;
    const bool above = value > 3.0 * epsilon;
    scan.rows.push_back({gamma, value, above});
    if (!above && !scan.crossover) scan.crossover = gamma;
  }
  return scan;
}

}  // namespace metaband
