#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace metaband {

/// Seeded random source. The engine is std::mt19937_64 seeded through
/// std::seed_seq, both of which have fully specified output; the variate
/// transforms below are written out so that (seed, stream) maps to the same
/// draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the polar Box-Muller transform.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn with probability proportional to `weights`.
  std::size_t categorical(std::span<const double> weights);

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// FNV-1a over the bytes of `text`, mixed into `seed`.
std::uint64_t hash_combine(std::uint64_t seed, std::string_view text);

}  // namespace metaband
