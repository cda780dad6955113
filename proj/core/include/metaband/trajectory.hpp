#pragma once

#include <cstddef>
#include <vector>

namespace metaband {

enum class Phase { classify, exploit, play };

const char* phase_name(Phase p);

/// One interaction step. `context` indexes the collection's context support.
struct Step {
  std::size_t context = 0;
  std::size_t arm = 0;
  double reward = 0.0;
  Phase phase = Phase::play;
};

/// Outcome of one test-time run of a bandit algorithm.
struct Episode {
  std::vector<Step> steps;
  std::size_t classified = 0;
  std::size_t classification_pulls = 0;
  /// The horizon ran out before classification finished.
  bool truncated = false;
};

}  // namespace metaband
