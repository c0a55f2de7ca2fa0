#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace mcv {

/// Keyed pseudo-random stream (xoshiro256** seeded through SplitMix64).
///
/// A stream is identified by a (seed, stream) pair. The same pair always
/// reproduces the same sequence; distinct pairs give decorrelated
/// sequences. Resampling and simulation code keys streams by the logical
/// index of the work item (resample b, replicate r), never by worker thread,
/// so results do not depend on the parallel schedule.
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random>
/// distributions.
class RngStream {
public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform draw in [0, 1) with 53 random bits.
  double uniform() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

private:
  std::array<std::uint64_t, 4> state_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

RngStream make_rng(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Derive a child seed for nested work (e.g. the resamples of replicate r).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace mcv
