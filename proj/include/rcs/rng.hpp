#pragma once

#include <cstdint>

namespace rcs {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Reproducible random stream keyed by (master seed, stream id).
///
/// Streams with distinct ids are statistically independent, so adding a new
/// consumer never perturbs draws taken elsewhere. All math is 64-bit integer;
/// sequences are identical across platforms.
class RngStream {
 public:
  enum class Purpose : std::uint64_t {
    kBackoff = 1,
    kJitter = 2,
    kRadcomLoss = 3,
    kPlacement = 4,
    kPenetration = 5,
  };

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t s = master_seed;
    const std::uint64_t a = splitmix64_next(s);
    std::uint64_t t = stream_id * 0x9E3779B97F4A7C15ull + 0x85EBCA6Bull;
    const std::uint64_t b = splitmix64_next(t);
    state_ = a ^ (b + 0x9E3779B97F4A7C15ull);
    (void)next_u64();
  }

  static RngStream vehicle_stream(std::uint64_t master_seed, std::uint32_t vehicle_id, Purpose p) {
    return RngStream(master_seed, (static_cast<std::uint64_t>(vehicle_id) << 8) |
                                      static_cast<std::uint64_t>(p));
  }

  /// Derives a child seed; used to give each replication its own master.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t s = seed ^ (salt * 0xD1B54A32D192ED03ull + 0x2545F4914F6CDD1Dull);
    return splitmix64_next(s);
  }

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  /// Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be >= 1.
  std::uint32_t next_below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace rcs
