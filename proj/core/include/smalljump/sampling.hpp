#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smalljump/models.hpp"

namespace smalljump {

/// Default truncation level of the compound Poisson approximation.
inline constexpr double kDefaultTruncEta = 1e-3;

/// n i.i.d. increments of X_Δ (or of one of its components) and the seed
/// that produced them.
struct IncrementSample
{
  std::vector<double> values;
  std::uint64_t seed = 0;
  ProcessConfig config;
  std::string generator;        ///< sampler name, kept in CSV headers
  double trunc_eta = 0.0;       ///< 0 when the sampler is exact
  bool variance_matching = false;
};

struct TruncationOptions
{
  double eta = kDefaultTruncEta;
  bool variance_matching = true;
};

/// Exact α-stable increments (A = B = 0) by the Chambers–Mallows–Stuck
/// transform, in the compensation convention of the Lévy–Itô decomposition
/// with threshold 1. Brownian part not included.
IncrementSample sample_stable_increments(const ProcessConfig& config, std::uint64_t seed);

/// Compound Poisson approximation of the full jump part for A > 0 or B > 0:
/// jumps with |x| > eta, the drift implied by the small jumps removed, and
/// optionally a Gaussian carrying their variance. Brownian part not included.
IncrementSample sample_tempered_stable_increments(const ProcessConfig& config, std::uint64_t seed,
                                                  const TruncationOptions& trunc = {});

/// Exact draws of the compound Poisson part X^B_Δ (jumps with |x| > ε).
IncrementSample sample_big_jump_increments(const ProcessConfig& config, std::uint64_t seed);

/// Compound Poisson approximation of Z_Δ = Δ b_ν + X^S_Δ built from the jumps
/// with eta < |x| <= ε.
IncrementSample sample_small_jump_increments(const ProcessConfig& config, std::uint64_t seed,
                                             const TruncationOptions& trunc = {});

/// Observations X_Δ = Δ b_ν + σ W_Δ + X^S_Δ + X^B_Δ: exact stable sampler when
/// A = B = 0, compound Poisson approximation otherwise. The Gaussian part uses
/// its own stream so the jump part does not depend on σ.
IncrementSample sample_full_increments(const ProcessConfig& config, std::uint64_t seed,
                                       const TruncationOptions& trunc = {});

/// Bound on sup_{|u|<=u_max} of the characteristic-function error caused by
/// replacing the jumps below eta with a drift (and a Gaussian when variance
/// matching is on), for an increment of length Δ.
double truncation_cf_bias(const ProcessConfig& config, const TruncationOptions& trunc, double u_max);

/// Stable scale σ_S and skewness β of the α-stable law with Lévy density
/// P x^(-1-α) on x > 0 and Q |x|^(-1-α) on x < 0.
struct StableParametrization
{
  double scale;
  double beta;
};
StableParametrization stable_parametrization(const TemperedStableParams& params);

/// CSV: '#'-prefixed metadata lines, a `value` header, one value per line.
void write_sample_csv(const IncrementSample& sample, const std::string& path);
IncrementSample read_sample_csv(const std::string& path);

} // namespace smalljump
