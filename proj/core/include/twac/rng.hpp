#pragma once

#include <cstdint>

namespace twac {

/// Seeded 64-bit linear congruential generator.
///
/// The recurrence is fixed bit-exactly so experiment outputs reproduce across
/// builds and platforms:
///     state <- 6364136223846793005 * state + 1442695040888963407   (mod 2^64)
/// Doubles are drawn from the top 53 bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : state_(seed) { next(); }

  std::uint64_t next() {
    state_ = 6364136223846793005ULL * state_ + 1442695040888963407ULL;
    return state_;
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  /// Derive an independent stream (e.g. one per trial index).
  Rng split(std::uint64_t tag) const {
    Rng r(state_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
    return r;
  }

 private:
  std::uint64_t state_;
};

}  // namespace twac
