#pragma once

#include <array>
#include <cstdint>

namespace smalljump {

/// SplitMix64 finalizer; used for seeding and stream derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the independent stream `stream` derived from `seed`. Pure function:
/// replication r always gets the same stream regardless of scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// xoshiro256** generator with portable, bit-exact distribution helpers. The
/// std:: distributions are avoided because their output is
/// implementation-defined.
class Rng
{
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{ 0 }; }

  result_type operator()() noexcept;

  /// Uniform on (0, 1), never returning either endpoint.
  double uniform_open() noexcept;
  /// Uniform on [a, b).
  double uniform(double a, double b) noexcept;
  double exponential() noexcept;
  double normal() noexcept;
  /// Poisson(mean): inversion for mean <= 30, transformed rejection (PTRS)
  /// above.
  std::uint64_t poisson(double mean);

private:
  std::uint64_t poisson_inversion(double mean) noexcept;
  std::uint64_t poisson_ptrs(double mean) noexcept;

  std::array<std::uint64_t, 4> s_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

} // namespace smalljump
