#include "metaband/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metaband/error.hpp"

namespace metaband {

namespace {

void softmax(const std::vector<double>& logits, std::vector<double>& out) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
}

}  // namespace

double row_guarantee(const Matrix& payoff, const std::vector<double>& row) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < payoff.cols; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < payoff.rows; ++r) s += row[r] * payoff(r, c);
    worst = std::min(worst, s);
  }
  return worst;
}

double col_guarantee(const Matrix& payoff, const std::vector<double>& col) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < payoff.rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < payoff.cols; ++c) s += payoff(r, c) * col[c];
    worst = std::max(worst, s);
  }
  return worst;
}

GameSolution solve_zero_sum(const Matrix& payoff, const GameOptions& options, const GameStop& stop) {
  const std::size_t n = payoff.rows;
  const std::size_t m = payoff.cols;
  if (n == 0 || m == 0) throw InvalidArgument("solve_zero_sum: empty payoff matrix");

  GameSolution sol;
  sol.row.assign(n, 1.0 / static_cast<double>(n));
  sol.col.assign(m, 1.0 / static_cast<double>(m));

  // Pure saddle point check first: covers degenerate and constant games exactly.
  {
    double best_row = -std::numeric_limits<double>::infinity();
    std::size_t best_r = 0;
    for (std::size_t r = 0; r < n; ++r) {
      double w = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < m; ++c) w = std::min(w, payoff(r, c));
      if (w > best_row) best_row = w, best_r = r;
    }
    double best_col = std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (std::size_t c = 0; c < m; ++c) {
      double w = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < n; ++r) w = std::max(w, payoff(r, c));
      if (w < best_col) best_col = w, best_c = c;
    }
    if (best_col - best_row <= 0.0) {
      std::fill(sol.row.begin(), sol.row.end(), 0.0);
      std::fill(sol.col.begin(), sol.col.end(), 0.0);
      sol.row[best_r] = 1.0;
      sol.col[best_c] = 1.0;
      sol.lower = best_row;
      sol.upper = best_col;
      sol.value = 0.5 * (best_row + best_col);
      return sol;
    }
  }

  const auto [lo_it, hi_it] = std::minmax_element(payoff.data.begin(), payoff.data.end());
  const double offset = *lo_it;
  const double scale = *hi_it - *lo_it;
  const double eta = options.step;

  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> y(m, 1.0 / static_cast<double>(m));
  std::vector<double> x_sum(n, 0.0);
  std::vector<double> y_sum(m, 0.0);
  std::vector<double> x_avg(n);
  std::vector<double> y_avg(m);
  std::vector<double> lx(n, 0.0);
  std::vector<double> ly(m, 0.0);
  std::vector<double> gx(n, 0.0);
  std::vector<double> gy(m, 0.0);
  std::vector<double> gx_prev(n, 0.0);
  std::vector<double> gy_prev(m, 0.0);

  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  auto done = [&] {
    if (stop) return stop(lower, upper);
    return upper - lower <= options.tol;
  };

  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    // Gains on the rescaled payoff (A - offset) / scale.
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < m; ++c) s += payoff(r, c) * y[c];
      gx[r] = (s - offset) / scale;
    }
    for (std::size_t c = 0; c < m; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += x[r] * payoff(r, c);
      gy[c] = (s - offset) / scale;
    }

    // Bounds certified by the current iterates.
    const double cur_lower = *std::min_element(gy.begin(), gy.end()) * scale + offset;
    const double cur_upper = *std::max_element(gx.begin(), gx.end()) * scale + offset;
    if (cur_lower > lower) lower = cur_lower, sol.row = x;
    if (cur_upper < upper) upper = cur_upper, sol.col = y;

    for (std::size_t r = 0; r < n; ++r) x_sum[r] += x[r];
    for (std::size_t c = 0; c < m; ++c) y_sum[c] += y[c];
    if (it % 8 == 0) {
      for (std::size_t r = 0; r < n; ++r) x_avg[r] = x_sum[r] / static_cast<double>(it);
      for (std::size_t c = 0; c < m; ++c) y_avg[c] = y_sum[c] / static_cast<double>(it);
      const double avg_lower = row_guarantee(payoff, x_avg);
      const double avg_upper = col_guarantee(payoff, y_avg);
      if (avg_lower > lower) lower = avg_lower, sol.row = x_avg;
      if (avg_upper < upper) upper = avg_upper, sol.col = y_avg;
    }

    sol.iterations = it;
    if (done()) break;
    if (it == options.max_iter) {
      throw NonConvergence("solve_zero_sum: duality gap " + std::to_string(upper - lower) + " after " +
                           std::to_string(it) + " iterations");
    }

    for (std::size_t r = 0; r < n; ++r) lx[r] += eta * (2.0 * gx[r] - gx_prev[r]);
    for (std::size_t c = 0; c < m; ++c) ly[c] -= eta * (2.0 * gy[c] - gy_prev[c]);
    gx_prev = gx;
    gy_prev = gy;
    softmax(lx, x);
    softmax(ly, y);
  }

  sol.lower = lower;
  sol.upper = upper;
  sol.value = 0.5 * (lower + upper);
  return sol;
}

}  // namespace metaband
