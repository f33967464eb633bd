#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace dirlab {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t x);

/// A deterministic random stream identified by (seed, label, index).
///
/// Streams with different labels or indices are statistically independent and
/// never share state, so work can be split across threads in any schedule
/// without changing a single drawn value.
class Substream {
 public:
  Substream(std::uint64_t seed, std::string_view label, std::uint64_t index);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t index() const { return index_; }

 private:
  PhiloxKey key_{};
  std::uint64_t index_ = 0;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
};

inline Substream substream(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  return Substream(seed, label, index);
}

}  // namespace dirlab
