#pragma once

#include <cstdint>

namespace codedelay {

/// Counter-based 64-bit generator: output n of stream `key` is mix64(key + n * kGamma),
/// with mix64 the SplitMix64 finalizer. Identical bit streams on every platform.
///
/// Stream split rule: CounterRng::derive(seed, id) uses key = mix64(seed ^ mix64(id + kGamma)).
/// The simulator draws erasures from stream 1, transmit-count rounding from stream 2 and
/// coding coefficients from stream 3 of a replication seed; replication r of a master seed
/// uses seed derive_seed(master, r).
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit CounterRng(std::uint64_t key = 0) : key_(key) {}

  static CounterRng derive(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint8_t byte() { return static_cast<std::uint8_t>(next() >> 56); }

  std::uint64_t counter() const { return counter_; }
  std::uint64_t key() const { return key_; }

  static constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication);

}  // namespace codedelay
