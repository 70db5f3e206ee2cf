#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace beamsurfer {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Consumers of randomness. Each one draws from its own stream so that adding
// a new consumer never shifts the values seen by the others.
enum class Stream : std::uint64_t
{
  motion = 1,
  ripple = 2,
  blockers = 3,
  noise = 4,
  acquisition = 5,
  scenario = 6,
};

// Counter-based random stream: value(i) depends only on (seed, stream, i),
// so random access is pure and thread-safe.
class RandomStream
{
public:
  constexpr RandomStream(std::uint64_t seed, Stream stream) noexcept
      : key_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream) * 0x632be59bd9b4e019ULL)))
  {
  }

  constexpr RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : key_(splitmix64(seed ^ splitmix64(stream_id * 0x632be59bd9b4e019ULL)))
  {
  }

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept
  {
    return splitmix64(key_ ^ splitmix64(counter + 0x5851f42d4c957f2dULL));
  }

  // Uniform in [0, 1).
  double uniform(std::uint64_t counter) const noexcept
  {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const noexcept
  {
    return lo + (hi - lo) * uniform(counter);
  }

  // Standard normal via Box-Muller on counters (2i, 2i+1).
  double normal(std::uint64_t counter) const noexcept
  {
    const double u1 = 1.0 - uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

  constexpr RandomStream substream(std::uint64_t id) const noexcept { return RandomStream(key_, id); }

private:
  std::uint64_t key_;
};

} // namespace beamsurfer
