#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "metaband/envsim.hpp"
#include "metaband/game.hpp"

namespace metaband {

/// Inputs of the decision-estimation coefficient: per-task action gaps and
/// the pairwise Hellinger table on every arm.
struct DecInstance {
  std::size_t tasks = 0;
  std::size_t arms = 0;
  std::vector<double> gaps;       // tasks x arms
  std::vector<double> hellinger;  // tasks x tasks x arms, symmetric, zero diagonal
  double gamma = 0.0;

  double gap(std::size_t i, std::size_t k) const { return gaps[i * arms + k]; }
  double dist(std::size_t i, std::size_t m, std::size_t k) const { return hellinger[(i * tasks + m) * arms + k]; }

  static DecInstance from_collection(const BanditCollection& coll, double gamma);
  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;
};

struct DecResult {
  double value = 0.0;
  std::vector<double> omega;  // maximizing prior over tasks
  std::vector<double> pi;     // minimizing arm mixture against it
};

inline constexpr std::size_t kMaxDecTasks = 4;

/// Every point of the simplex over `parts` coordinates whose entries are
/// multiples of 1 / divisions.
std::vector<std::vector<double>> simplex_grid(std::size_t parts, std::size_t divisions);

/// Payoff of the inner game for a fixed prior: rows are tasks (maximizer),
/// columns are arms (minimizer).
Matrix dec_payoff(const DecInstance& inst, const std::vector<double>& omega);

/// max over the gridded prior omega of the inner min-max game value, each
/// game solved by multiplicative weights.
DecResult dec_coefficient(const DecInstance& inst, double grid_step = 0.02, const GameOptions& options = {});

struct DecScanRow {
  double gamma = 0.0;
  double dec = 0.0;
  bool above = false;  // dec > 3 eps
};

struct DecScan {
  double epsilon = 0.0;
  double lambda = 0.0;
  std::vector<DecScanRow> rows;
  /// Smallest scanned gamma at which dec falls to 3 eps or below.
  std::optional<double> crossover;
};

DecScan dec_threshold_scan(const BanditCollection& coll, double epsilon, double lambda,
                           const std::vector<double>& gamma_grid, double grid_step = 0.02);

}  // namespace metaband
