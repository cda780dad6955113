#include "metaband/complexity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>

#include "metaband/error.hpp"
#include "metaband/hellinger.hpp"

namespace metaband {

namespace {

std::size_t popcount(TaskMask m) { return static_cast<std::size_t>(std::popcount(m)); }

void require_tasks(std::size_t m, std::size_t cap, const char* what) {
  if (m > cap) {
    throw InvalidArgument(std::string(what) + ": exhaustive subset enumeration limited to M <= " +
                          std::to_string(cap) + " (got " + std::to_string(m) + ")");
  }
}

void require_tests(const TestClass& tests, std::size_t num_arms) {
  if (tests.arms.empty()) throw InvalidArgument("test class is empty");
  for (std::size_t a : tests.arms) {
    if (a >= num_arms) throw InvalidArgument("test class references arm " + std::to_string(a) + " out of range");
  }
}

// Rows are tests, columns are members; entries count eliminated members.
Matrix subset_payoff(const SeparationTable& table, std::span<const std::size_t> tests, TaskMask subset) {
  std::vector<std::size_t> members;
  for (TaskMask rest = subset; rest != 0; rest &= rest - 1) {
    members.push_back(static_cast<std::size_t>(std::countr_zero(rest)));
  }
  Matrix payoff(tests.size(), members.size());
  for (std::size_t t = 0; t < tests.size(); ++t) {
    for (std::size_t c = 0; c < members.size(); ++c) {
      payoff(t, c) = static_cast<double>(popcount(subset & table.separated(tests[t], members[c])));
    }
  }
  return payoff;
}

}  // namespace

HypothesisSet::HypothesisSet(std::vector<std::size_t> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

HypothesisSet HypothesisSet::full(std::size_t num_tasks) {
  std::vector<std::size_t> all(num_tasks);
  for (std::size_t i = 0; i < num_tasks; ++i) all[i] = i;
  return HypothesisSet(std::move(all));
}

HypothesisSet HypothesisSet::from_mask(TaskMask mask) {
  std::vector<std::size_t> out;
  while (mask != 0) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return HypothesisSet(std::move(out));
}

bool HypothesisSet::contains(std::size_t task) const {
  return std::binary_search(members_.begin(), members_.end(), task);
}

TaskMask HypothesisSet::mask() const {
  TaskMask m = 0;
  for (std::size_t i : members_) {
    if (i >= kMaxTasks) throw InvalidArgument("hypothesis set: task index beyond 64");
    m |= TaskMask{1} << i;
  }
  return m;
}

TestClass TestClass::all_arms(std::size_t num_arms) {
  TestClass t;
  for (std::size_t a = 0; a < num_arms; ++a) t.arms.push_back(a);
  return t;
}

TestClass TestClass::separating_arms(const BanditCollection& coll) {
  std::vector<bool> optimal(coll.num_arms(), false);
  for (std::size_t i = 0; i < coll.num_tasks(); ++i) optimal[coll.optimal_arm(i)] = true;
  TestClass t;
  for (std::size_t a = 0; a < coll.num_arms(); ++a) {
    if (!optimal[a]) t.arms.push_back(a);
  }
  return t;
}

SeparationTable::SeparationTable(const BanditCollection& coll, double lambda)
    : tasks_(coll.num_tasks()), arms_(coll.num_arms()), masks_(coll.num_tasks() * coll.num_arms(), 0) {
  if (tasks_ > kMaxTasks) throw InvalidArgument("separation table: at most 64 tasks supported");
  for (std::size_t a = 0; a < arms_; ++a) {
    for (std::size_t i = 0; i < tasks_; ++i) {
      for (std::size_t j = i + 1; j < tasks_; ++j) {
        if (reaches(arm_hellinger_sq(coll, i, j, a), lambda)) {
          masks_[a * tasks_ + i] |= TaskMask{1} << j;
          masks_[a * tasks_ + j] |= TaskMask{1} << i;
        }
      }
    }
  }
}

HypothesisSet elimination_set(const BanditCollection& coll, const HypothesisSet& subset, std::size_t arm,
                              std::size_t true_task, double lambda) {
  if (!subset.contains(true_task)) throw InvalidArgument("elimination_set: true task not in the hypothesis set");
  std::vector<std::size_t> out;
  for (std::size_t m : subset) {
    if (m == true_task) continue;
    if (reaches(arm_hellinger_sq(coll, true_task, m, arm), lambda)) out.push_back(m);
  }
  return HypothesisSet(std::move(out));
}

std::size_t greedy_value(const SeparationTable& table, std::span<const std::size_t> tests, TaskMask subset) {
  std::size_t best = 0;
  for (std::size_t a : tests) {
    std::size_t worst = SIZE_MAX;
    for (TaskMask rest = subset; rest != 0 && worst > best; rest &= rest - 1) {
      const auto i = static_cast<std::size_t>(std::countr_zero(rest));
      worst = std::min(worst, popcount(subset & table.separated(a, i)));
    }
    best = std::max(best, worst);
  }
  return best;
}

Coefficient classification_coefficient(const BanditCollection& coll, const TestClass& tests, double lambda) {
  const std::size_t m = coll.num_tasks();
  require_tasks(m, kMaxCoefficientTasks, "classification_coefficient");
  require_tests(tests, coll.num_arms());
  const SeparationTable table(coll, lambda);

  Coefficient out{1.0, 0};
  const TaskMask all = (TaskMask{1} << m) - 1;
  for (TaskMask s = 1; s <= all && s != 0; ++s) {
    const std::size_t size = popcount(s);
    if (size < 2) continue;
    const std::size_t v = greedy_value(table, tests.arms, s);
    const double c = v == 0 ? kInfinity : static_cast<double>(size) / static_cast<double>(v);
    if (c > out.value) {
      out = {c, s};
      if (std::isinf(c)) break;
    }
  }
  return out;
}

GameSolution randomized_subset_game(const SeparationTable& table, std::span<const std::size_t> tests, TaskMask subset,
                                    double tol, std::size_t max_iter) {
  GameOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solve_zero_sum(subset_payoff(table, tests, subset), opts);
}

Coefficient randomized_coefficient(const BanditCollection& coll, const TestClass& tests, double lambda, double tol,
                                   std::size_t max_iter) {
  const std::size_t m = coll.num_tasks();
  require_tasks(m, kMaxCoefficientTasks, "randomized_coefficient");
  require_tests(tests, coll.num_arms());
  const SeparationTable table(coll, lambda);

  Coefficient out{1.0, 0};
  const TaskMask all = (TaskMask{1} << m) - 1;
  for (TaskMask s = 1; s <= all && s != 0; ++s) {
    const std::size_t size = popcount(s);
    if (size < 2) continue;
    const auto dsize = static_cast<double>(size);

    // A member that no test can separate from anything makes the value 0.
    bool stuck = false;
    for (TaskMask rest = s; rest != 0 && !stuck; rest &= rest - 1) {
      const auto i = static_cast<std::size_t>(std::countr_zero(rest));
      bool any = false;
      for (std::size_t a : tests.arms) any = any || (s & table.separated(a, i)) != 0;
      stuck = !any;
    }
    if (stuck) return {kInfinity, s};

    // Randomizing never hurts, so the deterministic value caps this subset.
    const std::size_t det = greedy_value(table, tests.arms, s);
    if (det > 0 && dsize / static_cast<double>(det) <= out.value) continue;

    const Matrix payoff = subset_payoff(table, tests.arms, s);
    GameOptions opts;
    opts.max_iter = max_iter;
    const auto bracket_ok = [&](double lo, double hi) {
      if (lo <= 0.0) return false;
      // Settled, or certainly no larger than the current maximum.
      return dsize * (hi - lo) / (lo * hi) <= tol || dsize / lo <= out.value;
    };
    const GameSolution sol = solve_zero_sum(payoff, opts, bracket_ok);
    if (dsize / sol.lower <= out.value) continue;
    const double c = dsize / sol.value;
    if (c > out.value) out = {c, s};
  }
  return out;
}

double optimal_tree_depth(const MeanTable& means, const TestClass& tests, double lambda) {
  const std::size_t m = means.tasks;
  require_tasks(m, kMaxDepthTasks, "optimal_tree_depth");
  require_tests(tests, means.arms);
  if (m == 1) return 0.0;

  constexpr std::uint8_t kUnknown = 0xFF;
  constexpr std::uint8_t kUnsplittable = 0xFE;
  std::vector<std::uint8_t> memo(std::size_t{1} << m, kUnknown);
  constexpr double kGapSlack = 1e-9;

  // Recursive lambda over subset masks.
  auto depth = [&](auto&& self, TaskMask s) -> std::uint8_t {
    if (popcount(s) <= 1) return 0;
    std::uint8_t& slot = memo[s];
    if (slot != kUnknown) return slot;
    std::uint8_t best = kUnsplittable;
    std::vector<std::pair<double, std::size_t>> vals;
    for (std::size_t a : tests.arms) {
      vals.clear();
      for (TaskMask rest = s; rest != 0; rest &= rest - 1) {
        const auto i = static_cast<std::size_t>(std::countr_zero(rest));
        vals.emplace_back(means(i, a), i);
      }
      std::sort(vals.begin(), vals.end());
      TaskMask low = 0;
      for (std::size_t p = 0; p + 1 < vals.size(); ++p) {
        low |= TaskMask{1} << vals[p].second;
        const double gap = vals[p + 1].first - vals[p].first;
        if (gap <= 0.0 || gap < lambda - kGapSlack) continue;
        const std::uint8_t dl = self(self, low);
        if (dl == kUnsplittable) continue;
        const std::uint8_t dh = self(self, s & ~low);
        if (dh == kUnsplittable) continue;
        best = std::min<std::uint8_t>(best, static_cast<std::uint8_t>(1 + std::max(dl, dh)));
      }
    }
    slot = best;
    return best;
  };
  const std::uint8_t d = depth(depth, (TaskMask{1} << m) - 1);
  return d == kUnsplittable ? kInfinity : static_cast<double>(d);
}

double optimal_tree_depth(const BanditCollection& coll, const TestClass& tests, double lambda) {
  return optimal_tree_depth(coll.mean_table(), tests, lambda);
}

CoefficientReport coefficient_report(const BanditCollection& coll, double lambda, double tol,
                                     std::optional<double> star_lambda) {
  const TestClass tests = TestClass::all_arms(coll.num_arms());
  CoefficientReport r;
  r.lambda = lambda;
  r.star_lambda = star_lambda.value_or(lambda);
  const Coefficient det = classification_coefficient(coll, tests, lambda);
  r.c_det = det.value;
  r.witness_subset = det.witness;
  r.c_rand = randomized_coefficient(coll, tests, lambda, tol).value;
  if (coll.num_tasks() <= kMaxDepthTasks) r.c_star = optimal_tree_depth(coll, tests, r.star_lambda);
  if (coll.num_tasks() == 1) r.c_det = r.c_rand = 1.0;

  const double log_m = std::log2(static_cast<double>(coll.num_tasks()));
  r.rand_le_det = std::isinf(r.c_det) || r.c_rand <= r.c_det + tol;
  r.det_le_star = r.c_det <= r.c_star;
  r.star_le_det_log = r.c_star <= r.c_det * (1.0 + log_m);
  if (!r.rand_le_det) {
    throw Error("coefficient_report: randomized coefficient exceeds the deterministic one beyond tolerance");
  }
  return r;
}

}  // namespace metaband
