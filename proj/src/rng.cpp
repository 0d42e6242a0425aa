#include "hcl/rng.hpp"

namespace hcl {
namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

std::uint64_t mix(std::uint64_t h, std::uint64_t v) noexcept {
  std::uint64_t state = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  return splitmix64(state);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStream RngStream::child(std::initializer_list<std::uint64_t> keys) const noexcept {
  std::uint64_t h = mix(0x6a09e667f3bcc909ULL, stream_id);
  for (auto k : keys) h = mix(h, k);
  return RngStream{seed, h};
}

Engine::Engine(RngStream stream) noexcept {
  std::uint64_t state = mix(stream.seed, stream.stream_id);
  for (auto& word : s_) word = splitmix64(state);
}

Engine::result_type Engine::operator()() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Engine::uniform_open() noexcept {
  // 53 random bits, shifted by half an ulp so 0 is never returned.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace hcl
