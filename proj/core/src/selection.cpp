#include "smalljump/selection.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "smalljump/csv_io.hpp"
#include "smalljump/error.hpp"
#include "smalljump/estimators.hpp"
#include "smalljump/quadrature.hpp"
#include "fft.hpp"

namespace smalljump {

namespace {

constexpr double kPi = std::numbers::pi;

// Deconvolved spectrum on u_k = k·step, k < count.
std::vector<Complex> deconvolved_spectrum(std::span<const double> sample, double step,
                                          std::size_t count, const CfFunction& noise_cf)
{
  auto spectrum = UniformEcfPlan(step, count).evaluate(sample);
  for (std::size_t k = 0; k < count; ++k) {
    const Complex d = noise_cf(static_cast<double>(k) * step);
    if (!(std::abs(d) >= 1e-300))
      throw NumericError("noise characteristic function vanishes at u = " +
                         format_double(static_cast<double>(k) * step));
    spectrum[k] /= d;
  }
  return spectrum;
}

} // namespace

void CutoffGrid::validate(double epsilon, std::size_t n) const
{
  if (m_values.empty())
    throw ValidationError("cutoff grid is empty");
  const double floor = kPi / (2.0 * epsilon);
  if (m_values.front() < floor * (1.0 - 1e-12))
    throw ValidationError("cutoff grid starts below pi/(2 epsilon)");
  if (m_values.back() > static_cast<double>(n))
    throw ValidationError("cutoff grid exceeds n");
  for (std::size_t k = 1; k < m_values.size(); ++k)
    if (!(m_values[k] > m_values[k - 1]))
      throw ValidationError("cutoff grid must be strictly increasing");
}

CutoffGrid CutoffGrid::geometric(double epsilon, std::size_t n, double ratio, double m_cap)
{
  if (!(ratio > 1.0))
    throw ValidationError("cutoff grid ratio must be > 1");
  const double floor = kPi / (2.0 * epsilon);
  const double top = std::min(static_cast<double>(n), m_cap);
  CutoffGrid grid;
  for (int k = 0;; ++k) {
    const double m = floor * std::pow(ratio, k);
    if (m > top)
      break;
    grid.m_values.push_back(m);
  }
  if (grid.m_values.empty())
    throw ValidationError("cutoff grid is empty: pi/(2 epsilon) exceeds min(n, cap)");
  return grid;
}

double penalty(double m, double lambda_delta, std::size_t n, double kappa)
{
  if (n < 1)
    throw ValidationError("penalty: n must be >= 1");
  return kappa * std::exp(4.0 * lambda_delta) * m / static_cast<double>(n);
}

double gaussian_cutoff_cap(double sigma, double delta)
{
  const double s2d = sigma * sigma * delta;
  return s2d > 0.0 ? std::sqrt(690.0 / s2d) : std::numeric_limits<double>::infinity();
}

double gaussian_penalty(double m, double lambda_delta, std::size_t n, double kappa, double sigma,
                        double delta)
{
  const double s2d = sigma * sigma * delta;
  if (s2d == 0.0)
    return penalty(m, lambda_delta, n, kappa);
  if (m > gaussian_cutoff_cap(sigma, delta))
    throw NumericError("gaussian_penalty: exp(sigma^2 Delta m^2) overflows");
  auto f = [s2d](double u) { return std::exp(s2d * u * u); };
  const auto r = quad::integrate(f, 0.0, m, { 1e-13, 0.0, 2000 });
  quad::require_converged(r, "gaussian_penalty");
  return kappa * std::exp(4.0 * lambda_delta) * r.value / static_cast<double>(n);
}

std::vector<double> penalties(const CutoffGrid& grid, double lambda_delta, std::size_t n, double kappa,
                              double sigma, double delta)
{
  std::vector<double> out(grid.m_values.size());
  const double s2d = sigma * sigma * delta;
  if (s2d == 0.0) {
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = penalty(grid.m_values[k], lambda_delta, n, kappa);
    return out;
  }
  // accumulate ∫_0^m e^{σ²Δu²} du segment by segment
  auto f = [s2d](double u) { return std::exp(s2d * u * u); };
  double integral = 0.0, prev = 0.0;
  const double scale = kappa * std::exp(4.0 * lambda_delta) / static_cast<double>(n);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double m = grid.m_values[k];
    if (m > gaussian_cutoff_cap(sigma, delta))
      throw NumericError("penalties: exp(sigma^2 Delta m^2) overflows on the cutoff grid");
    const auto r = quad::integrate(f, prev, m, { 1e-13, 0.0, 2000 });
    quad::require_converged(r, "gaussian penalty");
    integral += r.value;
    prev = m;
    out[k] = scale * integral;
  }
  return out;
}

std::vector<double> contrasts_from_spectrum(std::span<const Complex> spectrum, double step,
                                            const CutoffGrid& grid)
{
  std::vector<double> out(grid.m_values.size());
  double cumulative = 0.0; // trapezoid over [0, k·step]
  std::size_t k = 0;
  for (std::size_t g = 0; g < out.size(); ++g) {
    const double m = grid.m_values[g];
    auto full = static_cast<std::size_t>(std::floor(m / step));
    double rest = m - static_cast<double>(full) * step;
    if (rest < 1e-12 * step)
      rest = 0.0;
    if (full + 1 >= spectrum.size() + (rest == 0.0 ? 1 : 0))
      throw ValidationError("contrasts_from_spectrum: spectrum does not reach the cutoff grid");
    for (; k < full; ++k)
      cumulative += 0.5 * step * (std::norm(spectrum[k]) + std::norm(spectrum[k + 1]));
    double total = cumulative;
    if (rest > 0.0) {
      const double theta = rest / step;
      total += 0.5 * rest * ((2.0 - theta) * std::norm(spectrum[full]) + theta * std::norm(spectrum[full + 1]));
    }
    out[g] = -total / kPi;
  }
  return out;
}

Selection select_from_contrasts(const CutoffGrid& grid, std::span<const double> contrasts,
                                std::span<const double> pens, double kappa)
{
  const std::size_t size = grid.m_values.size();
  if (size == 0)
    throw ValidationError("select_cutoff: empty cutoff grid");
  if (contrasts.size() != size || pens.size() != size)
    throw ValidationError("select_cutoff: contrast/penalty length mismatch");
  Selection sel;
  sel.kappa_below_theory = kappa < kTheoreticalKappa;
  sel.trace.reserve(size);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < size; ++k) {
    const double obj = contrasts[k] + pens[k];
    sel.trace.push_back({ grid.m_values[k], contrasts[k], pens[k], obj });
    if (obj < best) {
      best = obj;
      sel.index = k;
    }
  }
  if (!std::isfinite(best))
    throw NumericError("select_cutoff: objective is not finite on the grid");
  sel.m_hat = grid.m_values[sel.index];
  return sel;
}

double contrast(std::span<const double> sample, double m, const CfFunction& noise_cf)
{
  if (sample.empty())
    throw ValidationError("contrast: empty sample");
  if (!(m > 0.0))
    throw ValidationError("contrast: m must be > 0");
  double step = 0.02;
  double previous = 0.0;
  for (int level = 0; level < 12; ++level) {
    const auto w = cutoff_weights(step, m);
    const auto spectrum = deconvolved_spectrum(sample, step, w.size(), noise_cf);
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
      s += w[k] * std::norm(spectrum[k]);
    const double value = -s / kPi;
    if (level > 0 && std::abs(value - previous) <= 1e-6 * std::abs(value))
      return value;
    previous = value;
    step *= 0.5;
  }
  throw NumericError("contrast: trapezoid refinement did not reach relative change 1e-6");
}

Selection select_cutoff(std::span<const double> sample, const CutoffGrid& grid,
                        const CfFunction& noise_cf, double lambda_delta, double kappa)
{
  if (grid.m_values.empty())
    throw ValidationError("select_cutoff: empty cutoff grid");
  if (!(kappa > 0.0))
    throw ValidationError("select_cutoff: kappa must be > 0");
  if (sample.empty())
    throw ValidationError("select_cutoff: empty sample");
  const double step = 0.02;
  const std::size_t count = cutoff_weights(step, grid.m_values.back()).size();
  const auto spectrum = deconvolved_spectrum(sample, step, count, noise_cf);
  const auto c = contrasts_from_spectrum(spectrum, step, grid);
  std::vector<double> pens(grid.m_values.size());
  for (std::size_t k = 0; k < pens.size(); ++k)
    pens[k] = penalty(grid.m_values[k], lambda_delta, sample.size(), kappa);
  return select_from_contrasts(grid, c, pens, kappa);
}

Complex sinc_basis_coefficient(std::span<const double> sample, double m, long j,
                               const CfFunction& noise_cf)
{
  if (!(m > 0.0))
    throw ValidationError("sinc_basis_coefficient: m must be > 0");
  // trapezoid over [-m, m]; both the lattice frequency and φ̂ resolved
  const auto cells = static_cast<std::size_t>(std::max<long>(16384, 512 * std::abs(j)));
  const double step = m / static_cast<double>(cells);
  const auto spectrum = deconvolved_spectrum(sample, step, cells + 1, noise_cf);
  const double freq = static_cast<double>(j) * kPi / m;
  Complex sum{};
  for (std::size_t k = 0; k <= cells; ++k) {
    const double u = static_cast<double>(k) * step;
    const double w = k == cells ? 0.5 : 1.0;
    // u and -u together: φ̂(u) e^{-iuf} + conj(φ̂(u)) e^{iuf}; u = 0 is one interior node
    const Complex e(std::cos(u * freq), -std::sin(u * freq));
    const Complex pair = k == 0 ? spectrum[0] : spectrum[k] * e + std::conj(spectrum[k]) * std::conj(e);
    sum += w * pair;
  }
  return sum * step / (2.0 * std::sqrt(kPi * m));
}

std::vector<Complex> sinc_basis_coefficients(std::span<const double> sample, double m, long J,
                                             const CfFunction& noise_cf)
{
  if (!(m > 0.0) || J < 0)
    throw ValidationError("sinc_basis_coefficients: need m > 0 and J >= 0");
  const std::size_t total = detail::fft_friendly_size(std::max<std::size_t>(16 * (2 * J + 1), 1 << 16));
  const std::size_t N = total % 2 == 0 ? total : total * 2;
  const std::size_t half = N / 2;
  const double step = 2.0 * m / static_cast<double>(N);
  const auto spectrum = deconvolved_spectrum(sample, step, half + 1, noise_cf);
  const detail::ComplexFft fft(N);
  std::unique_ptr<Complex, detail::FftwDeleter> in(detail::RealFft::allocate_complex(N));
  std::unique_ptr<Complex, detail::FftwDeleter> out(detail::RealFft::allocate_complex(N));
  // node k holds u_k = -m + k·step; k = 0 averages the two endpoints
  Complex* g = in.get();
  for (std::size_t k = 1; k < N; ++k) {
    if (k < half)
      g[k] = std::conj(spectrum[half - k]);
    else
      g[k] = spectrum[k - half];
  }
  g[0] = 0.5 * (std::conj(spectrum[half]) + spectrum[half]);
  fft.forward(in.get(), out.get());
  std::vector<Complex> coeffs(2 * J + 1);
  const double scale = step / (2.0 * std::sqrt(kPi * m));
  for (long j = -J; j <= J; ++j) {
    const std::size_t idx = j >= 0 ? static_cast<std::size_t>(j) : N - static_cast<std::size_t>(-j);
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    coeffs[static_cast<std::size_t>(j + J)] = sign * scale * out.get()[idx];
  }
  return coeffs;
}

void write_trace_csv(const Selection& selection, const std::string& path)
{
  auto out = open_output(path);
  CsvWriter w(out);
  w.metadata("m_hat", format_double(selection.m_hat));
  w.metadata("kappa_below_theory", selection.kappa_below_theory ? "true" : "false");
  w.header({ "m", "contrast", "penalty", "objective" });
  for (const auto& r : selection.trace)
    w.row({ r.m, r.contrast, r.penalty, r.objective });
  if (!out)
    throw ValidationError("failed writing " + path);
}

} // namespace smalljump
