#pragma once

#include <cstddef>
#include <string>

namespace smalljump {

/// Lévy density of tempered-stable type,
///   p(x) = P x^(-1-α) e^(-A x)      for x > 0,
///   p(x) = Q |x|^(-1-α) e^(-B |x|)  for x < 0.
/// A = B = 0 is the α-stable case.
struct TemperedStableParams
{
  double P = 1.0;
  double Q = 1.0;
  double A = 0.0;
  double B = 0.0;
  double alpha = 1.0;

  /// Throws ValidationError describing every violated invariant.
  void validate() const;
  bool is_stable() const noexcept { return A == 0.0 && B == 0.0; }
  bool is_symmetric() const noexcept { return P == Q && A == B; }
  /// ∫_{|x|<=1} |x| p(x) dx < ∞, which for this family is exactly α < 1.
  bool finite_variation() const noexcept { return alpha < 1.0; }
};

struct ProcessConfig
{
  TemperedStableParams params;
  double epsilon = 1.0; ///< small/large jump threshold, in (0, 1]
  double delta = 1.0;   ///< sampling interval
  double sigma = 0.0;   ///< Brownian volatility
  std::size_t n = 1000; ///< number of increments

  void validate() const;
};

std::string describe(const TemperedStableParams& p);
std::string describe(const ProcessConfig& c);

/// p(x). Throws ValidationError at x = 0.
double levy_density(const TemperedStableParams& params, double x);

struct OreyConstants
{
  double M;
  double alpha;
};

/// (M, α) with ∫_{-η}^{η} x² p(x) dx >= M η^(2-α) for all 0 < η <= 1.
/// Only ε = 1 is supported; other thresholds throw ValidationError.
OreyConstants orey_constants(const TemperedStableParams& params, double epsilon);

/// λ = ν(ℝ \ [-ε, ε]).
double big_jump_intensity(const TemperedStableParams& params, double epsilon);

/// Drift b_ν of the small-jump component Z_Δ = Δ b_ν + X^S_Δ: ∫_{|x|<=ε} x p
/// when α < 1, -∫_{ε<|x|<=1} x p otherwise.
double small_jump_drift(const TemperedStableParams& params, double epsilon);

/// One-sided integral ∫_lo^hi x^(k-1-α) e^(-tempering·x) dx, with hi = +inf
/// allowed and lo = 0 allowed when k > α. Closed form without tempering,
/// adaptive quadrature (relative tolerance 1e-12) otherwise.
double side_moment(double tempering, double alpha, double k, double lo, double hi);

/// ∫_{lo<|x|<=hi} x^k p(x) dx summed over both sides, with sign (-1)^k on the
/// negative side.
double signed_moment(const TemperedStableParams& params, int k, double lo, double hi);

} // namespace smalljump
