#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "smalljump/charfn.hpp"

namespace smalljump {

/// Candidate cutoffs, strictly increasing, inside [π/(2ε), n].
struct CutoffGrid
{
  std::vector<double> m_values;

  void validate(double epsilon, std::size_t n) const;

  /// π/(2ε)·ratio^k for every k with value <= min(n, m_cap).
  static CutoffGrid geometric(double epsilon, std::size_t n, double ratio = 1.01,
                              double m_cap = std::numeric_limits<double>::infinity());
};

/// κ from the oracle inequality: any κ above 32/(3π) is covered.
inline constexpr double kTheoreticalKappa = 32.0 / (3.0 * 3.14159265358979323846) + 1e-6;
inline constexpr double kDefaultKappa = 0.9;

/// -(1/2π) ∫_{-m}^{m} |φ̂(u)|² du, φ̂ = empirical_cf / noise_cf, by the
/// trapezoid rule with step 0.02 halved until the relative change is below
/// 1e-6.
double contrast(std::span<const double> sample, double m, const CfFunction& noise_cf);

/// κ e^{4λΔ} m / n.
double penalty(double m, double lambda_delta, std::size_t n, double kappa);

/// κ e^{4λΔ} (1/n) ∫_0^m e^{σ²Δu²} du, the Brownian analogue; equals
/// penalty() when σ = 0.
double gaussian_penalty(double m, double lambda_delta, std::size_t n, double kappa, double sigma,
                        double delta);

/// Largest cutoff with σ²Δm² <= 690, so that e^{σ²Δm²} stays finite.
double gaussian_cutoff_cap(double sigma, double delta);

struct TraceRow
{
  double m;
  double contrast;
  double penalty;
  double objective;
};

struct Selection
{
  double m_hat = 0.0;
  std::size_t index = 0;
  std::vector<TraceRow> trace;
  bool kappa_below_theory = false;
};

/// Penalties for every grid point.
std::vector<double> penalties(const CutoffGrid& grid, double lambda_delta, std::size_t n, double kappa,
                              double sigma = 0.0, double delta = 1.0);

/// Contrast at every grid point from a deconvolved spectrum given on
/// u_k = k·step, accumulated cell by cell with the weights of cutoff_weights.
std::vector<double> contrasts_from_spectrum(std::span<const Complex> spectrum, double step,
                                            const CutoffGrid& grid);

/// argmin of contrast + penalty, ties to the smallest m.
Selection select_from_contrasts(const CutoffGrid& grid, std::span<const double> contrasts,
                                std::span<const double> penalties, double kappa);

/// Penalized contrast selection over `grid` with the pen(m) = κ e^{4λΔ} m/n
/// penalty.
Selection select_cutoff(std::span<const double> sample, const CutoffGrid& grid,
                        const CfFunction& noise_cf, double lambda_delta, double kappa);

/// â_{m,j} = (1/(2√(πm))) ∫_{-m}^{m} φ̂(u) e^{-iujπ/m} du, the coefficient of
/// φ̂'s inverse transform on the orthonormal basis √(m/π) sinc(mx - jπ).
Complex sinc_basis_coefficient(std::span<const double> sample, double m, long j,
                               const CfFunction& noise_cf);

/// All coefficients for |j| <= J (index j + J), by one FFT over a fine
/// frequency mesh.
std::vector<Complex> sinc_basis_coefficients(std::span<const double> sample, double m, long J,
                                             const CfFunction& noise_cf);

/// CSV with columns m,contrast,penalty,objective.
void write_trace_csv(const Selection& selection, const std::string& path);

} // namespace smalljump
