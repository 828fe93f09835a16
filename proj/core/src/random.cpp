#include "smalljump/random.hpp"

#include <cmath>
#include <numbers>

#include "smalljump/error.hpp"

namespace smalljump {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
  return (x << k) | (x >> (64 - k));
}

} // namespace

Rng::Rng(std::uint64_t seed) noexcept
{
  std::uint64_t x = seed;
  for (auto& word : s_) {
    x += 0x9e3779b97f4a7c15ULL;
    word = splitmix64(x);
  }
}

Rng::result_type Rng::operator()() noexcept
{
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

double Rng::uniform_open() noexcept
{
  // 52 random mantissa bits, shifted by half an ulp off zero
  return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
}

double Rng::uniform(double a, double b) noexcept
{
  return a + (b - a) * (static_cast<double>((*this)() >> 11) * 0x1.0p-53);
}

double Rng::exponential() noexcept
{
  return -std::log(uniform_open());
}

double Rng::normal() noexcept
{
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Marsaglia polar method
  double u, v, s;
  do {
    u = uniform(-1.0, 1.0);
    v = uniform(-1.0, 1.0);
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * f;
  has_cached_normal_ = true;
  return u * f;
}

std::uint64_t Rng::poisson(double mean)
{
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw ValidationError("poisson mean must be finite and non-negative");
  if (mean == 0.0)
    return 0;
  return mean <= 30.0 ? poisson_inversion(mean) : poisson_ptrs(mean);
}

std::uint64_t Rng::poisson_inversion(double mean) noexcept
{
  // sequential search from zero
  const double u = uniform_open();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf)
      break;
    cdf = next;
  }
  return k;
}

// Hörmann (1993), "The transformed rejection method for generating Poisson
// random variables".
std::uint64_t Rng::poisson_ptrs(double mean) noexcept
{
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform_open() - 0.5;
    const double v = uniform_open();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr)
      return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us))
      continue;
    const double lhs = std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b);
    const double rhs = -mean + k * loglam - std::lgamma(k + 1.0);
    if (lhs <= rhs)
      return static_cast<std::uint64_t>(k);
  }
}

} // namespace smalljump
