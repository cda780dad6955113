#pragma once

#include <string>
#include <vector>

#include "metaband/envsim.hpp"
#include "metaband/io.hpp"

namespace testing {

/// The singleton context of non-contextual collections.
inline const metaband::Vector kUnit{1.0};

inline metaband::BanditCollection fixture(const std::string& name) {
  return metaband::load_collection(std::string(METABAND_FIXTURE_DIR) + "/" + name);
}

/// Non-contextual Bernoulli collection from a tasks x arms mean table.
inline metaband::BanditCollection bernoulli(const std::vector<std::vector<double>>& means, double lambda = 0.4) {
  std::vector<metaband::BanditInstance> inst;
  for (const auto& row : means) {
    metaband::BanditInstance b;
    for (double m : row) {
      b.theta.push_back({m});
      b.noise.push_back(metaband::Noise::bernoulli());
    }
    inst.push_back(std::move(b));
  }
  return metaband::BanditCollection(std::move(inst), metaband::ContextDistribution::non_contextual(), lambda);
}

/// Same, with Gaussian noise of the given sigma on every arm.
inline metaband::BanditCollection gaussian(const std::vector<std::vector<double>>& means, double sigma,
                                           double lambda = 0.4) {
  std::vector<metaband::BanditInstance> inst;
  for (const auto& row : means) {
    metaband::BanditInstance b;
    for (double m : row) {
      b.theta.push_back({m});
      b.noise.push_back(metaband::Noise::gaussian(sigma));
    }
    inst.push_back(std::move(b));
  }
  return metaband::BanditCollection(std::move(inst), metaband::ContextDistribution::non_contextual(), lambda);
}

}  // namespace testing
