#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "smalljump/models.hpp"

namespace smalljump {

using Complex = std::complex<double>;
using CfFunction = std::function<Complex(double)>;

/// Characteristic-function values on a sorted frequency grid.
struct CfGrid
{
  std::vector<double> u_values;
  std::vector<Complex> cf_values;

  /// Throws ValidationError unless u_values is strictly increasing and the
  /// two vectors have equal length.
  void validate() const;
};

/// Evaluates `cf` on `u_values` (must be strictly increasing).
CfGrid tabulate(const CfFunction& cf, std::vector<double> u_values);

/// Exact characteristic function of Z_Δ = Δ b_ν + X^S_Δ through the
/// Lévy–Khintchine exponent restricted to |x| <= 1. The sine kernel is
/// compensated (sin(ux) - ux) when α >= 1. Requires ε = 1.
Complex cf_small_jumps(const ProcessConfig& config, double u);

/// Lévy–Khintchine exponent of the small-jump part per unit time, so that
/// cf_small_jumps = exp(Δ · exponent).
Complex small_jump_exponent(const TemperedStableParams& params, double u);

/// Characteristic function of the compound Poisson part X^B_Δ,
/// exp(Δ ∫_{|x|>ε} (e^{iux} - 1) p(x) dx).
Complex cf_big_jumps(const ProcessConfig& config, double u);

/// Same as cf_big_jumps for many frequencies, sharing the u-independent
/// pieces.
std::vector<Complex> cf_big_jumps(const ProcessConfig& config, std::span<const double> u);

/// e^{-σ²Δu²/2}.
double cf_gaussian(double sigma, double delta, double u) noexcept;

/// (1/n) Σ_j e^{i u x_j}. Exactly 1 at u = 0.
Complex empirical_cf(std::span<const double> sample, double u);

/// Empirical characteristic function at u_k = k·step for k < count. Single
/// pass per frequency with phasor rotation, re-anchored with exact sin/cos
/// every few hundred steps; agrees with the naive loop to ~1e-13.
std::vector<Complex> empirical_cf_uniform(std::span<const double> sample, double step,
                                          std::size_t count);

/// Empirical characteristic function at u_k = k·step, k < count, through a
/// type-1 non-uniform FFT (exponential-of-semicircle spreading kernel, twofold
/// oversampling). Cost O(n + count·log count) per sample; agrees with the
/// direct sum to ~1e-13 absolute. The plan is immutable and may be shared by
/// threads.
class UniformEcfPlan
{
public:
  UniformEcfPlan(double step, std::size_t count);

  std::vector<Complex> evaluate(std::span<const double> sample) const;

  double step() const noexcept { return step_; }
  std::size_t count() const noexcept { return count_; }

private:
  double step_;
  std::size_t count_;
  std::size_t grid_;
  int width_;
  double beta_;
  std::vector<double> correction_;
};

/// empirical_cf(sample, u) / noise_cf(u). Throws NumericError when
/// |noise_cf(u)| < 1e-300.
Complex deconvolved_cf(std::span<const double> sample, double u, const CfFunction& noise_cf);

/// ∫_a^∞ e^{-z x} x^{-s} dx for Re z >= 0, a > 0, evaluated along the ray
/// x = a + t / z where the integrand decays like e^{-t}.
Complex exponential_tail_integral(Complex z, double s, double a);

} // namespace smalljump
