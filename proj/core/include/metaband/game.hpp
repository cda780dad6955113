#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace metaband {

/// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct GameOptions {
  /// Stop once upper - lower <= tol (in payoff units).
  double tol = 1e-4;
  std::size_t max_iter = 100000;
  /// Optimistic-hedge step on payoffs rescaled to [0, 1].
  double step = 0.5;
};

/// Result of a two-player zero-sum matrix game in which the row player
/// maximizes x' A y and the column player minimizes it.
struct GameSolution {
  double value = 0.0;
  double lower = 0.0;  // guaranteed by `row`
  double upper = 0.0;  // guaranteed by `col`
  std::vector<double> row;
  std::vector<double> col;
  std::size_t iterations = 0;
};

/// Optional custom stopping rule on the current (lower, upper) bracket.
using GameStop = std::function<bool(double lower, double upper)>;

/// Solves the game with optimistic multiplicative weights. Both players'
/// best strategies seen so far (last iterates and running averages) certify
/// the bracket [lower, upper] around the game value. Throws NonConvergence
/// when the iteration cap is hit first.
GameSolution solve_zero_sum(const Matrix& payoff, const GameOptions& options = {}, const GameStop& stop = {});

/// min over columns of x' A.
double row_guarantee(const Matrix& payoff, const std::vector<double>& row);
/// max over rows of A y.
double col_guarantee(const Matrix& payoff, const std::vector<double>& col);

}  // namespace metaband
