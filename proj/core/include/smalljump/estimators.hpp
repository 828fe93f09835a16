#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smalljump/charfn.hpp"
#include "smalljump/models.hpp"
#include "smalljump/sampling.hpp"

namespace smalljump {

enum class EstimatorKind
{
  KnownNoise,
  Direct,
  GaussianNoise,
  Benchmark
};

std::string_view to_string(EstimatorKind kind);
/// Accepts known-noise, direct, gaussian-noise, benchmark.
EstimatorKind parse_estimator_kind(std::string_view name);

/// Uniform evaluation grid lo = x_0 < ... < x_{points-1} = hi.
struct UniformGrid
{
  double lo = -1.0;
  double hi = 1.0;
  std::size_t points = 2048;

  void validate() const;
  double spacing() const { return (hi - lo) / static_cast<double>(points - 1); }
  double at(std::size_t i) const { return lo + spacing() * static_cast<double>(i); }
  double max_abs() const;
  std::vector<double> values() const;
};

/// [-w s, w s] with s = (ΔM)^(1/α) ∨ Δ^(1/α) (M from orey_constants when
/// ε = 1, otherwise s = Δ^(1/α)) and w = half_width (15 by default).
UniformGrid default_x_grid(const ProcessConfig& config, std::size_t points = 2048,
                           double half_width = 15.0);

/// Largest admissible frequency step for inversion on `grid`:
/// min(π / (4 max|x|), 0.05).
double max_inversion_step(const UniformGrid& grid);

/// Frequency step shared by selection and inversion: min(π / (4 max|x|), 0.02).
double mesh_step(const UniformGrid& grid);

/// Weights w_k for ∫_0^m f(u) du ≈ Σ_k w_k f(k·step): trapezoid on the full
/// cells, with f linearly interpolated on the last partial cell. The result
/// has floor(m/step) + 2 entries; the last one is 0 when m is a node.
std::vector<double> cutoff_weights(double step, double m);

/// (1/π) Σ_k w_k Re(φ_k e^{-i k·step·x}) on every x of `grid`, i.e. the
/// inversion (1/2π) ∫_{-m}^{m} φ(u) e^{-iux} du of a Hermitian φ given on
/// u >= 0. Summation order over k is fixed for every x.
std::vector<double> invert_spectrum(std::span<const Complex> spectrum, double step,
                                    std::span<const double> weights, const UniformGrid& grid);

struct Inversion
{
  std::vector<double> values;
  double u_step = 0.0;
  bool step_too_coarse = false; ///< requested step exceeded max_inversion_step
};

/// Trapezoid approximation of (1/2π) ∫_{-m}^{m} cf(u) e^{-iux} du on `grid`,
/// real part. With u_step = 0 the step is max_inversion_step(grid), shrunk so
/// that m is a node.
Inversion fourier_invert(const CfFunction& cf, double m, const UniformGrid& grid, double u_step = 0.0);

/// Characteristic function the empirical CF is divided by: cf_big_jumps for
/// KnownNoise, cf_big_jumps · cf_gaussian for GaussianNoise, 1 for Direct.
CfFunction noise_cf(const ProcessConfig& config, EstimatorKind kind);

/// noise_cf(config, kind) at u_k = k·step, k < count.
std::vector<Complex> tabulate_noise(const ProcessConfig& config, EstimatorKind kind, double step,
                                    std::size_t count, unsigned threads = 1);

struct SpectralEstimate
{
  EstimatorKind kind = EstimatorKind::KnownNoise;
  double m = 0.0;
  double u_step = 0.0;
  UniformGrid grid;
  std::vector<double> values;
  /// Deconvolved (or exact) characteristic function on u_k = k·u_step.
  CfGrid spectrum;

  std::vector<double> x_grid() const { return grid.values(); }
};

/// Checks the cutoff preconditions of `kind` (m >= π/(2ε) for the
/// deconvolution estimators, σ > 0 and σ²Δm²/2 <= 700 for GaussianNoise).
void check_cutoff(const ProcessConfig& config, EstimatorKind kind, double m);

/// Inversion at cutoff m of a spectrum given on u_k = k·step (k covering
/// [0, m + step)).
SpectralEstimate estimate_from_spectrum(EstimatorKind kind, std::span<const Complex> spectrum,
                                        double step, double m, const UniformGrid& grid);

/// Spectral estimator with an explicit noise characteristic function.
SpectralEstimate estimate_with_noise(const IncrementSample& sample, EstimatorKind kind, double m,
                                     const UniformGrid& grid, const CfFunction& noise);

SpectralEstimate estimate_known_noise(const IncrementSample& sample, double m, const UniformGrid& grid);
SpectralEstimate estimate_direct(const IncrementSample& sample, double m, const UniformGrid& grid);
SpectralEstimate estimate_gaussian_noise(const IncrementSample& sample, double m, const UniformGrid& grid);
SpectralEstimate estimate(const IncrementSample& sample, EstimatorKind kind, double m,
                          const UniformGrid& grid);

/// Cutoff ℓ of the benchmark: 1000 (Δ < 1) / 100 (Δ >= 1) for stable
/// parameters, 50 / 10 for tempered ones.
double default_benchmark_ell(const ProcessConfig& config);

/// cf_small_jumps at u_k = k·step, k < count, evaluated in parallel.
std::vector<Complex> small_jump_spectrum(const ProcessConfig& config, double step, std::size_t count,
                                         unsigned threads = 1);

/// g_{Δ,ℓ}(x) = (1/2π) ∫_{-ℓ}^{ℓ} φ_{Z_Δ}(u) e^{-iux} du on `grid`, with
/// frequency step mesh_step(grid).
SpectralEstimate benchmark_density(const ProcessConfig& config, double ell, const UniformGrid& grid,
                                   unsigned threads = 1);

/// sup_x |g_{Δ,2ℓ}(x) - g_{Δ,ℓ}(x)|.
double benchmark_doubling_change(const ProcessConfig& config, double ell, const UniformGrid& grid,
                                 unsigned threads = 1);

/// Σ (est - bench)² / Σ bench² on a common grid.
double relative_l2_error(const SpectralEstimate& estimate, const SpectralEstimate& benchmark);
double relative_l2_error(std::span<const double> estimate, std::span<const double> benchmark);

/// Σ values² Δx.
double l2_norm_squared(const SpectralEstimate& estimate);
/// (1/2π) ∫_{-m}^{m} |φ|² du with the weights of cutoff_weights.
double spectral_l2_norm_squared(std::span<const Complex> spectrum, double step, double m);

struct BoundReport
{
  double bias_bound = 0.0;
  double variance_bound = 0.0;
  std::optional<double> m_star;
  std::string m_star_note; ///< why m_star is undefined, or which formula gave it
  double C = 0.0;          ///< bias constant 1/(2α(2MΔ)^(1/α)), bias = C Γ(1/α, cΔm^α)
  double c = 0.0;          ///< decay constant 2^(α+1) M / π^α
  double lambda = 0.0;
  double M = 0.0;
};

/// Squared-bias and variance bounds at cutoff m and the cutoff minimizing
/// their sum. With σ > 0 the variance bound is e^{4λΔ}/(πn) ∫_0^m e^{σ²Δu²} du
/// and, for α = 1, m_star is the positive root of σ²Δm² + cΔm = log(c_λ n).
BoundReport theoretical_bounds(const ProcessConfig& config, double m, double n);

/// max(π/(2ε), m_star), or π/(2ε) when m_star is undefined.
double oracle_cutoff(const ProcessConfig& config);

/// Upper bound on sup_x g_Δ(x):
/// 1/(2ε) + (π/α)/(2(ΔM)^(1/α)) Γ(1/α, ΔM/ε^α).
double sup_norm_bound(const ProcessConfig& config);

/// Decay envelope exp(-(2^α M / π^α) |u|^α Δ) of |φ_{Z_Δ} φ_{X^B_Δ}|, valid
/// for |u| >= π/(2ε).
double decay_bound(const ProcessConfig& config, double u);

/// CSV with columns x,value and '#' metadata (kind, m, u_step plus `extra`).
void write_estimate_csv(const SpectralEstimate& estimate, const std::string& path,
                        const std::map<std::string, std::string>& extra = {});

} // namespace smalljump
