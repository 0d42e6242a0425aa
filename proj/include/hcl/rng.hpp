#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace hcl {

/// Identifies one independent random stream. Identical (seed, stream_id)
/// pairs always yield identical draw sequences, whatever thread runs them.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// Child stream keyed by additional indices (replicate, purpose, ...).
  RngStream child(std::initializer_list<std::uint64_t> keys) const noexcept;
};

/// Stream purposes, mixed into stream keys so that draws made for different
/// roles never overlap.
enum class Purpose : std::uint64_t {
  HistoricalData = 1,
  FutureObservation = 2,
  Bootstrap = 3,
  Calibration = 4,
  McmcChain = 5,
  Predictive = 6,
  Method = 7,
};

inline std::uint64_t key(Purpose p) noexcept { return static_cast<std::uint64_t>(p); }

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256** seeded from a stream key via splitmix64. Satisfies
/// UniformRandomBitGenerator so it plugs into <random> distributions.
class Engine {
 public:
  using result_type = std::uint64_t;

  explicit Engine(RngStream stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double in (0, 1).
  double uniform_open() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace hcl
