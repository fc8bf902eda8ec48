#pragma once

// Counter-based Philox4x32-10 stream. A stream is (seed, stream id); draws are
// a pure function of (seed, stream id, draw index), so replicas are independent
// and a trajectory can resume from a recorded draw count.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace lrsep {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32U);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32U);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53U;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57U;
  static constexpr std::uint32_t kW0 = 0x9E3779B9U;
  static constexpr std::uint32_t kW1 = 0xBB67AE85U;
};

/// 64-bit draws from Philox blocks; satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng() = default;
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t block_index = draws_ >> 1U;
    if (block_index != cached_block_ || !have_block_) {
      const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_index),
                                    static_cast<std::uint32_t>(block_index >> 32U),
                                    static_cast<std::uint32_t>(stream_),
                                    static_cast<std::uint32_t>(stream_ >> 32U)};
      const Philox4x32::Key key{static_cast<std::uint32_t>(seed_),
                                static_cast<std::uint32_t>(seed_ >> 32U)};
      block_ = Philox4x32::block(ctr, key);
      cached_block_ = block_index;
      have_block_ = true;
    }
    const std::size_t half = (draws_ & 1U) ? 2 : 0;
    ++draws_;
    return (std::uint64_t{block_[half]} << 32U) | block_[half + 1];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11U) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  /// Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  /// Uniform integer in [0, n) by multiply-shift on 64 random bits.
  std::uint64_t below(std::uint64_t n) {
    const unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    return static_cast<std::uint64_t>(m >> 64U);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t draws() const { return draws_; }

  /// Repositions the stream after `draws` 64-bit outputs.
  void seek(std::uint64_t draws) {
    draws_ = draws;
    have_block_ = false;
  }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t draws_ = 0;
  std::uint64_t cached_block_ = 0;
  bool have_block_ = false;
  Philox4x32::Counter block_{};
};

}  // namespace lrsep
