#include "smalljump/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "smalljump/csv_io.hpp"
#include "smalljump/error.hpp"
#include "smalljump/parallel.hpp"
#include "smalljump/quadrature.hpp"
#include "smalljump/special_functions.hpp"

namespace smalljump {

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

std::string_view to_string(EstimatorKind kind)
{
  switch (kind) {
    case EstimatorKind::KnownNoise:
      return "known-noise";
    case EstimatorKind::Direct:
      return "direct";
    case EstimatorKind::GaussianNoise:
      return "gaussian-noise";
    case EstimatorKind::Benchmark:
      return "benchmark";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view name)
{
  for (auto k : { EstimatorKind::KnownNoise, EstimatorKind::Direct, EstimatorKind::GaussianNoise,
                  EstimatorKind::Benchmark })
    if (name == to_string(k))
      return k;
  throw ValidationError("unknown estimator kind '" + std::string(name) +
                        "' (expected known-noise, direct, gaussian-noise or benchmark)");
}

void UniformGrid::validate() const
{
  if (points < 2)
    throw ValidationError("x grid needs at least 2 points");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ValidationError("x grid needs finite lo < hi");
}

double UniformGrid::max_abs() const
{
  return std::max(std::abs(lo), std::abs(hi));
}

std::vector<double> UniformGrid::values() const
{
  std::vector<double> x(points);
  for (std::size_t i = 0; i < points; ++i)
    x[i] = at(i);
  return x;
}

UniformGrid default_x_grid(const ProcessConfig& config, std::size_t points, double half_width)
{
  config.validate();
  if (!(half_width > 0.0))
    throw ValidationError("default_x_grid: half_width must be > 0");
  const double a = config.params.alpha;
  double scale = std::pow(config.delta, 1.0 / a);
  if (config.epsilon == 1.0) {
    const double M = orey_constants(config.params, 1.0).M;
    scale = std::max(scale, std::pow(config.delta * M, 1.0 / a));
  }
  return { -half_width * scale, half_width * scale, points };
}

double max_inversion_step(const UniformGrid& grid)
{
  return std::min(kPi / (4.0 * grid.max_abs()), 0.05);
}

double mesh_step(const UniformGrid& grid)
{
  return std::min(kPi / (4.0 * grid.max_abs()), 0.02);
}

std::vector<double> cutoff_weights(double step, double m)
{
  if (!(step > 0.0) || !(m > 0.0))
    throw ValidationError("cutoff_weights: step and m must be > 0");
  auto full = static_cast<std::size_t>(std::floor(m / step));
  double rest = m - static_cast<double>(full) * step;
  if (rest < 1e-12 * step) // m on a node up to rounding
    rest = 0.0;
  std::vector<double> w(full + 2, 0.0);
  for (std::size_t k = 0; k < full; ++k) {
    w[k] += 0.5 * step;
    w[k + 1] += 0.5 * step;
  }
  if (rest > 0.0) {
    const double theta = rest / step;
    w[full] += 0.5 * rest * (2.0 - theta);
    w[full + 1] += 0.5 * rest * theta;
  }
  return w;
}

std::vector<double> invert_spectrum(std::span<const Complex> spectrum, double step,
                                    std::span<const double> weights, const UniformGrid& grid)
{
  grid.validate();
  if (spectrum.size() < weights.size())
    throw ValidationError("invert_spectrum: spectrum shorter than the weights");
  constexpr std::size_t kAnchorEvery = 512;
  const std::size_t nx = grid.points;
  const std::vector<double> x = grid.values();
  std::vector<double> acc(nx, 0.0), c(nx), s(nx), rc(nx), rs(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    rc[i] = std::cos(step * x[i]);
    rs[i] = std::sin(step * x[i]);
  }
  const std::size_t count = weights.size();
  for (std::size_t k0 = 0; k0 < count; k0 += kAnchorEvery) {
    const double u0 = static_cast<double>(k0) * step;
    for (std::size_t i = 0; i < nx; ++i) {
      c[i] = std::cos(u0 * x[i]);
      s[i] = std::sin(u0 * x[i]);
    }
    const std::size_t k1 = std::min(count, k0 + kAnchorEvery);
    double* __restrict ap = acc.data();
    double* __restrict cp = c.data();
    double* __restrict sp = s.data();
    const double* __restrict rcp = rc.data();
    const double* __restrict rsp = rs.data();
    for (std::size_t k = k0; k < k1; ++k) {
      const double wr = weights[k] * spectrum[k].real();
      const double wi = weights[k] * spectrum[k].imag();
      for (std::size_t i = 0; i < nx; ++i) {
        const double ci = cp[i], si = sp[i];
        ap[i] += wr * ci + wi * si;
        cp[i] = ci * rcp[i] - si * rsp[i];
        sp[i] = ci * rsp[i] + si * rcp[i];
      }
    }
  }
  for (double& v : acc)
    v /= kPi;
  return acc;
}

Inversion fourier_invert(const CfFunction& cf, double m, const UniformGrid& grid, double u_step)
{
  grid.validate();
  if (!(m > 0.0))
    throw ValidationError("fourier_invert: m must be > 0");
  Inversion out;
  const double bound = max_inversion_step(grid);
  double step = u_step > 0.0 ? u_step : bound;
  out.step_too_coarse = step > bound;
  if (u_step <= 0.0)
    step = m / std::ceil(m / step);
  const auto w = cutoff_weights(step, m);
  std::vector<Complex> phi(w.size());
  for (std::size_t k = 0; k < w.size(); ++k)
    phi[k] = w[k] == 0.0 ? Complex{} : cf(static_cast<double>(k) * step);
  out.values = invert_spectrum(phi, step, w, grid);
  out.u_step = step;
  return out;
}

CfFunction noise_cf(const ProcessConfig& config, EstimatorKind kind)
{
  config.validate();
  switch (kind) {
    case EstimatorKind::Direct:
      return [](double) { return Complex(1.0, 0.0); };
    case EstimatorKind::KnownNoise:
      return [config](double u) { return cf_big_jumps(config, u); };
    case EstimatorKind::GaussianNoise:
      return [config](double u) {
        return cf_big_jumps(config, u) * cf_gaussian(config.sigma, config.delta, u);
      };
    case EstimatorKind::Benchmark:
      break;
  }
  throw ValidationError("noise_cf: the benchmark has no noise component");
}

std::vector<Complex> tabulate_noise(const ProcessConfig& config, EstimatorKind kind, double step,
                                    std::size_t count, unsigned threads)
{
  config.validate();
  std::vector<Complex> out(count, Complex(1.0, 0.0));
  if (kind == EstimatorKind::Direct)
    return out;
  if (kind == EstimatorKind::Benchmark)
    throw ValidationError("tabulate_noise: the benchmark has no noise component");
  // Big-jump CF evaluated in blocks so the shared pieces are computed once per block.
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t k0 = b * kBlock, k1 = std::min(count, k0 + kBlock);
    std::vector<double> u(k1 - k0);
    for (std::size_t k = k0; k < k1; ++k)
      u[k - k0] = static_cast<double>(k) * step;
    const auto big = cf_big_jumps(config, u);
    for (std::size_t k = k0; k < k1; ++k) {
      out[k] = big[k - k0];
      if (kind == EstimatorKind::GaussianNoise)
        out[k] *= cf_gaussian(config.sigma, config.delta, u[k - k0]);
    }
  });
  return out;
}

void check_cutoff(const ProcessConfig& config, EstimatorKind kind, double m)
{
  if (!(m > 0.0) || !std::isfinite(m))
    throw ValidationError("cutoff m must be a positive finite number");
  if (kind == EstimatorKind::KnownNoise || kind == EstimatorKind::GaussianNoise) {
    const double floor = kPi / (2.0 * config.epsilon);
    if (m < floor * (1.0 - 1e-12))
      throw ValidationError("cutoff m = " + format_double(m) + " is below pi/(2 epsilon) = " +
                            format_double(floor));
  }
  if (kind == EstimatorKind::GaussianNoise) {
    if (!(config.sigma > 0.0))
      throw ValidationError("the gaussian-noise estimator requires sigma > 0; use known-noise");
    if (config.sigma * config.sigma * config.delta * m * m / 2.0 > 700.0)
      throw NumericError("cutoff m = " + format_double(m) +
                         " puts the Gaussian factor exp(-sigma^2 Delta m^2 / 2) below 1e-300");
  }
}

SpectralEstimate estimate_from_spectrum(EstimatorKind kind, std::span<const Complex> spectrum,
                                        double step, double m, const UniformGrid& grid)
{
  const auto w = cutoff_weights(step, m);
  if (spectrum.size() < w.size())
    throw ValidationError("estimate_from_spectrum: spectrum does not reach the cutoff");
  SpectralEstimate est;
  est.kind = kind;
  est.m = m;
  est.u_step = step;
  est.grid = grid;
  est.values = invert_spectrum(spectrum, step, w, grid);
  est.spectrum.u_values.resize(w.size());
  est.spectrum.cf_values.assign(spectrum.begin(), spectrum.begin() + static_cast<std::ptrdiff_t>(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k)
    est.spectrum.u_values[k] = static_cast<double>(k) * step;
  return est;
}

SpectralEstimate estimate_with_noise(const IncrementSample& sample, EstimatorKind kind, double m,
                                     const UniformGrid& grid, const CfFunction& noise)
{
  grid.validate();
  if (sample.values.empty())
    throw ValidationError("empty sample");
  const double step = mesh_step(grid);
  const std::size_t count = cutoff_weights(step, m).size();
  auto spectrum = UniformEcfPlan(step, count).evaluate(sample.values);
  for (std::size_t k = 0; k < count; ++k) {
    const Complex d = noise(static_cast<double>(k) * step);
    if (!(std::abs(d) >= 1e-300))
      throw NumericError("noise characteristic function vanishes at u = " +
                         format_double(static_cast<double>(k) * step));
    spectrum[k] /= d;
  }
  return estimate_from_spectrum(kind, spectrum, step, m, grid);
}

SpectralEstimate estimate(const IncrementSample& sample, EstimatorKind kind, double m,
                          const UniformGrid& grid)
{
  if (kind == EstimatorKind::Benchmark)
    throw ValidationError("estimate: use benchmark_density for the benchmark");
  sample.config.validate();
  check_cutoff(sample.config, kind, m);
  if (kind == EstimatorKind::Direct)
    return estimate_with_noise(sample, kind, m, grid, noise_cf(sample.config, kind));
  // tabulate the noise once; the per-u closure would redo the shared pieces
  const double step = mesh_step(grid);
  const std::size_t count = cutoff_weights(step, m).size();
  const auto noise = tabulate_noise(sample.config, kind, step, count);
  auto spectrum = UniformEcfPlan(step, count).evaluate(sample.values);
  for (std::size_t k = 0; k < count; ++k)
    spectrum[k] /= noise[k];
  return estimate_from_spectrum(kind, spectrum, step, m, grid);
}

SpectralEstimate estimate_known_noise(const IncrementSample& sample, double m, const UniformGrid& grid)
{
  return estimate(sample, EstimatorKind::KnownNoise, m, grid);
}

SpectralEstimate estimate_direct(const IncrementSample& sample, double m, const UniformGrid& grid)
{
  return estimate(sample, EstimatorKind::Direct, m, grid);
}

SpectralEstimate estimate_gaussian_noise(const IncrementSample& sample, double m, const UniformGrid& grid)
{
  return estimate(sample, EstimatorKind::GaussianNoise, m, grid);
}

double default_benchmark_ell(const ProcessConfig& config)
{
  const bool fine = config.delta < 1.0;
  if (config.params.is_stable())
    return fine ? 1000.0 : 100.0;
  return fine ? 50.0 : 10.0;
}

std::vector<Complex> small_jump_spectrum(const ProcessConfig& config, double step, std::size_t count,
                                         unsigned threads)
{
  config.validate();
  std::vector<Complex> out(count);
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t k1 = std::min(count, (b + 1) * kBlock);
    for (std::size_t k = b * kBlock; k < k1; ++k)
      out[k] = cf_small_jumps(config, static_cast<double>(k) * step);
  });
  return out;
}

SpectralEstimate benchmark_density(const ProcessConfig& config, double ell, const UniformGrid& grid,
                                   unsigned threads)
{
  grid.validate();
  if (!(ell > 0.0))
    throw ValidationError("benchmark cutoff ell must be > 0");
  const double step = mesh_step(grid);
  const std::size_t count = cutoff_weights(step, ell).size();
  const auto spectrum = small_jump_spectrum(config, step, count, threads);
  return estimate_from_spectrum(EstimatorKind::Benchmark, spectrum, step, ell, grid);
}

double benchmark_doubling_change(const ProcessConfig& config, double ell, const UniformGrid& grid,
                                 unsigned threads)
{
  const double step = mesh_step(grid);
  const std::size_t count = cutoff_weights(step, 2.0 * ell).size();
  const auto spectrum = small_jump_spectrum(config, step, count, threads);
  const auto a = estimate_from_spectrum(EstimatorKind::Benchmark, spectrum, step, ell, grid);
  const auto b = estimate_from_spectrum(EstimatorKind::Benchmark, spectrum, step, 2.0 * ell, grid);
  double sup = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    sup = std::max(sup, std::abs(a.values[i] - b.values[i]));
  return sup;
}

double relative_l2_error(std::span<const double> estimate, std::span<const double> benchmark)
{
  if (estimate.size() != benchmark.size())
    throw ValidationError("relative_l2_error: grids differ");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double d = estimate[i] - benchmark[i];
    num += d * d;
    den += benchmark[i] * benchmark[i];
  }
  if (!(den >= 1e-300))
    throw NumericError("relative_l2_error: benchmark has zero norm on the grid");
  return num / den;
}

double relative_l2_error(const SpectralEstimate& estimate, const SpectralEstimate& benchmark)
{
  if (estimate.grid.lo != benchmark.grid.lo || estimate.grid.hi != benchmark.grid.hi ||
      estimate.grid.points != benchmark.grid.points)
    throw ValidationError("relative_l2_error: estimate and benchmark use different x grids");
  // Δx cancels in the ratio
  return relative_l2_error(estimate.values, benchmark.values);
}

double l2_norm_squared(const SpectralEstimate& estimate)
{
  double s = 0.0;
  for (double v : estimate.values)
    s += v * v;
  return s * estimate.grid.spacing();
}

double spectral_l2_norm_squared(std::span<const Complex> spectrum, double step, double m)
{
  const auto w = cutoff_weights(step, m);
  if (spectrum.size() < w.size())
    throw ValidationError("spectral_l2_norm_squared: spectrum does not reach the cutoff");
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    s += w[k] * std::norm(spectrum[k]);
  return s / kPi;
}

BoundReport theoretical_bounds(const ProcessConfig& config, double m, double n)
{
  config.validate();
  if (!(m > 0.0))
    throw ValidationError("theoretical_bounds: m must be > 0");
  if (!(n >= 1.0))
    throw ValidationError("theoretical_bounds: n must be >= 1");
  const auto [M, alpha] = orey_constants(config.params, config.epsilon);
  const double delta = config.delta;
  BoundReport r;
  r.M = M;
  r.lambda = big_jump_intensity(config.params, config.epsilon);
  r.C = 1.0 / (2.0 * alpha * std::pow(2.0 * M * delta, 1.0 / alpha));
  r.c = std::pow(2.0, alpha + 1.0) * M / std::pow(kPi, alpha);
  r.bias_bound = r.C * incomplete_gamma(1.0 / alpha, r.c * delta * std::pow(m, alpha));
  const double lambda_delta = r.lambda * delta;
  const double nn = n;
  const double s2d = config.sigma * config.sigma * delta;
  if (s2d > 0.0) {
    auto f = [s2d](double u) { return std::exp(s2d * u * u); };
    auto q = quad::integrate(f, 0.0, m, { 1e-12, 0.0, 2000 });
    quad::require_converged(q, "theoretical_bounds (variance integral)");
    r.variance_bound = std::exp(4.0 * lambda_delta) * q.value / (kPi * nn);
  } else {
    r.variance_bound = std::exp(4.0 * lambda_delta) * m / (kPi * nn);
  }

  if (s2d > 0.0 && alpha == 1.0) {
    const double c_lambda = kPi * r.c * r.C * std::exp(-4.0 * lambda_delta);
    const double L = std::log(c_lambda * nn);
    if (L > 0.0) {
      const double sig2 = config.sigma * config.sigma;
      // positive root of σ²Δm² + cΔm - L = 0, in the cancellation-free form
      r.m_star = (2.0 * L / delta) / (r.c + std::sqrt(r.c * r.c + 4.0 * sig2 * L / delta));
      r.m_star_note = "positive root of exp(sigma^2 Delta m^2 + c Delta m) = c_lambda n";
    } else {
      r.m_star_note = "undefined: c_lambda n <= 1";
    }
  } else {
    const double L = std::log(nn) - 4.0 * lambda_delta;
    if (L > 0.0) {
      r.m_star = 0.5 * kPi * std::pow(L / (2.0 * M * delta), 1.0 / alpha);
      r.m_star_note = s2d > 0.0 ? "noise-free formula; no closed form with sigma > 0 and alpha != 1"
                                : "(pi/2) ((log n - 4 lambda Delta) / (2 M Delta))^(1/alpha)";
    } else {
      r.m_star_note = "undefined: log n <= 4 lambda Delta";
    }
  }
  return r;
}

double oracle_cutoff(const ProcessConfig& config)
{
  const double floor = kPi / (2.0 * config.epsilon);
  const auto b = theoretical_bounds(config, floor, static_cast<double>(config.n));
  return b.m_star ? std::max(floor, *b.m_star) : floor;
}

double sup_norm_bound(const ProcessConfig& config)
{
  config.validate();
  const auto [M, alpha] = orey_constants(config.params, config.epsilon);
  const double dm = config.delta * M;
  return 1.0 / (2.0 * config.epsilon) +
         (kPi / alpha) / (2.0 * std::pow(dm, 1.0 / alpha)) *
           incomplete_gamma(1.0 / alpha, dm / std::pow(config.epsilon, alpha));
}

double decay_bound(const ProcessConfig& config, double u)
{
  const auto [M, alpha] = orey_constants(config.params, config.epsilon);
  return std::exp(-(std::pow(2.0, alpha) * M / std::pow(kPi, alpha)) * std::pow(std::abs(u), alpha) *
                  config.delta);
}

void write_estimate_csv(const SpectralEstimate& estimate, const std::string& path,
                        const std::map<std::string, std::string>& extra)
{
  auto out = open_output(path);
  CsvWriter w(out);
  w.metadata("kind", std::string(to_string(estimate.kind)));
  w.metadata("m", format_double(estimate.m));
  w.metadata("u_step", format_double(estimate.u_step));
  for (const auto& [k, v] : extra)
    w.metadata(k, v);
  w.header({ "x", "value" });
  for (std::size_t i = 0; i < estimate.values.size(); ++i)
    w.row({ estimate.grid.at(i), estimate.values[i] });
  if (!out)
    throw ValidationError("failed writing " + path);
}

} // namespace smalljump
