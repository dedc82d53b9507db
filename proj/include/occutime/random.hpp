#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <utility>

namespace occutime {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// The key is the 64-bit master seed; counter words 2..3 carry the stream id and
// words 0..1 count blocks within the stream, so streams never overlap for
// fewer than 2^64 blocks each.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block bijection(Block counter, Key key) noexcept;
};

// A single reproducible stream. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int used_ = 2;
};

// Uniform on (0, 1]: never returns 0, so -log(u) is finite.
double uniform_open_zero(CounterRng& rng) noexcept;

// -log(U) / rate with U from uniform_open_zero.
double exponential(CounterRng& rng, double rate) noexcept;

// Two independent N(0, 1) variates (Box-Muller).
std::pair<double, double> normal_pair(CounterRng& rng) noexcept;

}  // namespace occutime
