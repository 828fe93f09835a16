#include "smalljump/charfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "smalljump/error.hpp"
#include "smalljump/quadrature.hpp"
#include "fft.hpp"

namespace smalljump {

void CfGrid::validate() const
{
  if (u_values.size() != cf_values.size())
    throw ValidationError("CfGrid: u_values and cf_values differ in length");
  for (std::size_t k = 1; k < u_values.size(); ++k)
    if (!(u_values[k] > u_values[k - 1]))
      throw ValidationError("CfGrid: u_values must be strictly increasing");
}

CfGrid tabulate(const CfFunction& cf, std::vector<double> u_values)
{
  CfGrid grid;
  grid.u_values = std::move(u_values);
  grid.cf_values.reserve(grid.u_values.size());
  for (double u : grid.u_values)
    grid.cf_values.push_back(cf(u));
  grid.validate();
  return grid;
}

namespace {

constexpr quad::Options kExponentQuad{ 1e-11, 1e-15, 4000 };
constexpr quad::Options kTailQuad{ 1e-12, 1e-300, 2000 };

// cos(y) - 1 without cancellation
inline double cosm1(double y) noexcept
{
  const double h = std::sin(0.5 * y);
  return -2.0 * h * h;
}

// (sin(y) - y) / y^3
inline double sin_minus_id_over_cube(double y) noexcept
{
  const double y2 = y * y;
  if (std::abs(y) < 1e-2)
    return -1.0 / 6.0 + y2 / 120.0 - y2 * y2 / 5040.0 + y2 * y2 * y2 / 362880.0;
  return (std::sin(y) - y) / (y2 * y);
}

// sin(y) / y
inline double sinc(double y) noexcept
{
  if (std::abs(y) < 1e-4)
    return 1.0 - y * y / 6.0;
  return std::sin(y) / y;
}

// Per-side small-jump exponent for u > 0:
//   ∫_0^1 (e^{iux} - 1 - iux·[α>=1]) x^{-1-α} e^{-a x} dx.
Complex side_small_exponent(double a, double alpha, double u)
{
  const bool compensated = alpha >= 1.0;
  const double s = 1.0 + alpha;
  const double x0 = std::min(1.0, 1.0 / u);

  // Graded panel [0, x0]: integrands behave like powers of x at the origin,
  // removed by the substitution t = x^(1+β).
  auto re_near = [=](double x) { return u * u * (cosm1(u * x) / ((u * x) * (u * x))) * std::exp(-a * x); };
  const auto re0 = quad::integrate_power_weight(
    [&](double x) { return x == 0.0 ? -0.5 * u * u : re_near(x); }, 1.0 - alpha, x0, kExponentQuad);
  quad::require_converged(re0, "cf_small_jumps (real part near 0)");

  quad::Result<double> im0;
  if (compensated) {
    im0 = quad::integrate_power_weight(
      [=](double x) { return u * u * u * sin_minus_id_over_cube(u * x) * std::exp(-a * x); },
      2.0 - alpha, x0, kExponentQuad);
  } else {
    im0 = quad::integrate_power_weight(
      [=](double x) { return u * sinc(u * x) * std::exp(-a * x); }, -alpha, x0, kExponentQuad);
  }
  quad::require_converged(im0, "cf_small_jumps (imaginary part near 0)");

  Complex total(re0.value, im0.value);
  if (x0 >= 1.0)
    return total;

  // Oscillatory panel [x0, 1].
  if (u * (1.0 - x0) > 40.0) {
    // Many oscillations: use the exponential tails along rotated rays.
    const Complex z(a, -u);
    const Complex osc = exponential_tail_integral(z, s, x0) - exponential_tail_integral(z, s, 1.0);
    const double mass = side_moment(a, alpha, 0.0, x0, 1.0);
    Complex part = osc - mass;
    if (compensated)
      part -= Complex(0.0, u * side_moment(a, alpha, 1.0, x0, 1.0));
    return total + part;
  }
  auto f = [=](double x) {
    const double w = std::pow(x, -s) * std::exp(-a * x);
    const double im = compensated ? std::sin(u * x) - u * x : std::sin(u * x);
    return Complex(cosm1(u * x) * w, im * w);
  };
  const int panels = std::max(1, static_cast<int>(std::ceil(u * (1.0 - x0) / std::numbers::pi)));
  std::vector<double> bp(panels + 1);
  for (int i = 0; i <= panels; ++i)
    bp[i] = x0 + (1.0 - x0) * i / panels;
  const auto r = quad::integrate(f, std::span<const double>(bp), kExponentQuad);
  quad::require_converged(r, "cf_small_jumps (oscillatory part) at u=" + std::to_string(u));
  return total + r.value;
}

} // namespace

Complex exponential_tail_integral(Complex z, double s, double a)
{
  if (!(a > 0.0))
    throw ValidationError("exponential_tail_integral requires a > 0");
  if (z.real() < 0.0)
    throw ValidationError("exponential_tail_integral requires Re z >= 0");
  if (std::abs(z) == 0.0) {
    if (!(s > 1.0))
      throw ValidationError("exponential_tail_integral: divergent for z = 0, s <= 1");
    return Complex(std::pow(a, 1.0 - s) / (s - 1.0), 0.0);
  }
  const Complex w = 1.0 / z;
  const Complex za = z * a;
  if (std::abs(za) >= 40.0) {
    // asymptotic series e^{-za} a^{-s} / z · Σ_k (-1)^k (s)_k (za)^{-k}
    Complex term(1.0, 0.0), sum(1.0, 0.0);
    const Complex inv_za = 1.0 / za;
    for (int k = 0; k < 80; ++k) {
      term *= -(s + k) * inv_za;
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum))
        break;
    }
    return std::exp(-za) * std::pow(a, -s) * w * sum;
  }
  auto f =[=](double t) { return std::exp(-t) * std::pow(Complex(a, 0.0) + t * w, -s); };
  // The integrand changes on the scale t ~ a|z| near the origin and on the
  // scale 1 through e^{-t}.
  std::vector<double> bp{ 0.0 };
  const double scale = a * std::abs(z);
  for (double t = scale * 1e-3; t < 1.0; t *= 10.0)
    bp.push_back(t);
  for (double t : { 1.0, 4.0, 12.0, 30.0, 60.0, 745.0 })
    bp.push_back(t);
  auto r = quad::integrate(f, std::span<const double>(bp), kTailQuad);
  quad::require_converged(r, "exponential_tail_integral");
  return std::exp(-z * a) * w * r.value;
}

Complex small_jump_exponent(const TemperedStableParams& params, double u)
{
  if (u == 0.0)
    return { 0.0, 0.0 };
  const double au = std::abs(u);
  Complex e{};
  if (params.P > 0.0)
    e += params.P * side_small_exponent(params.A, params.alpha, au);
  if (params.Q > 0.0)
    e += params.Q * std::conj(side_small_exponent(params.B, params.alpha, au));
  return u < 0.0 ? std::conj(e) : e;
}

Complex cf_small_jumps(const ProcessConfig& config, double u)
{
  config.params.validate();
  if (config.epsilon != 1.0)
    throw ValidationError("cf_small_jumps: the exact small-jump characteristic function is only "
                          "available for epsilon = 1");
  if (u == 0.0)
    return { 1.0, 0.0 };
  return std::exp(config.delta * small_jump_exponent(config.params, u));
}

namespace {

struct BigJumpPieces
{
  double mass_pos = 0.0;
  double mass_neg = 0.0;
};

BigJumpPieces big_jump_pieces(const ProcessConfig& config)
{
  const auto& p = config.params;
  const double inf = std::numeric_limits<double>::infinity();
  BigJumpPieces pieces;
  if (p.P > 0.0)
    pieces.mass_pos = side_moment(p.A, p.alpha, 0.0, config.epsilon, inf);
  if (p.Q > 0.0)
    pieces.mass_neg = side_moment(p.B, p.alpha, 0.0, config.epsilon, inf);
  return pieces;
}

Complex big_jump_cf_with(const ProcessConfig& config, const BigJumpPieces& pieces, double u)
{
  if (u == 0.0)
    return { 1.0, 0.0 };
  const auto& p = config.params;
  const double au = std::abs(u);
  const double s = 1.0 + p.alpha;
  Complex e{};
  if (p.P > 0.0)
    e += p.P * (exponential_tail_integral(Complex(p.A, -au), s, config.epsilon) - pieces.mass_pos);
  if (p.Q > 0.0)
    e += p.Q * (exponential_tail_integral(Complex(p.B, au), s, config.epsilon) - pieces.mass_neg);
  const Complex cf = std::exp(config.delta * e);
  return u < 0.0 ? std::conj(cf) : cf;
}

} // namespace

Complex cf_big_jumps(const ProcessConfig& config, double u)
{
  config.validate();
  return big_jump_cf_with(config, big_jump_pieces(config), u);
}

std::vector<Complex> cf_big_jumps(const ProcessConfig& config, std::span<const double> u)
{
  config.validate();
  const auto pieces = big_jump_pieces(config);
  std::vector<Complex> out(u.size());
  for (std::size_t k = 0; k < u.size(); ++k)
    out[k] = big_jump_cf_with(config, pieces, u[k]);
  return out;
}

double cf_gaussian(double sigma, double delta, double u) noexcept
{
  return std::exp(-0.5 * sigma * sigma * delta * u * u);
}

Complex empirical_cf(std::span<const double> sample, double u)
{
  if (sample.empty())
    throw ValidationError("empirical_cf: empty sample");
  if (u == 0.0)
    return { 1.0, 0.0 };
  double re = 0.0, im = 0.0;
  for (double x : sample) {
    re += std::cos(u * x);
    im += std::sin(u * x);
  }
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  return { re * inv_n, im * inv_n };
}

std::vector<Complex> empirical_cf_uniform(std::span<const double> sample, double step,
                                          std::size_t count)
{
  if (sample.empty())
    throw ValidationError("empirical_cf_uniform: empty sample");
  constexpr std::size_t kAnchorEvery = 512;
  constexpr std::size_t kLanes = 8;
  const std::size_t n = sample.size();
  const std::size_t padded = (n + kLanes - 1) / kLanes * kLanes;
  // padding entries carry zero phasors so they never contribute
  std::vector<double> c(padded, 0.0), s(padded, 0.0), rc(padded, 1.0), rs(padded, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    rc[j] = std::cos(step * sample[j]);
    rs[j] = std::sin(step * sample[j]);
  }
  std::vector<Complex> out(count);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k0 = 0; k0 < count; k0 += kAnchorEvery) {
    const double u0 = static_cast<double>(k0) * step;
    for (std::size_t j = 0; j < n; ++j) {
      c[j] = std::cos(u0 * sample[j]);
      s[j] = std::sin(u0 * sample[j]);
    }
    const std::size_t k1 = std::min(count, k0 + kAnchorEvery);
    double* __restrict cp = c.data();
    double* __restrict sp = s.data();
    const double* __restrict rcp = rc.data();
    const double* __restrict rsp = rs.data();
    for (std::size_t k = k0; k < k1; ++k) {
      std::array<double, kLanes> acc_c{}, acc_s{};
      for (std::size_t j = 0; j < padded; j += kLanes) {
        for (std::size_t l = 0; l < kLanes; ++l) {
          const double cj = cp[j + l], sj = sp[j + l];
          acc_c[l] += cj;
          acc_s[l] += sj;
          cp[j + l] = cj * rcp[j + l] - sj * rsp[j + l];
          sp[j + l] = cj * rsp[j + l] + sj * rcp[j + l];
        }
      }
      double re = 0.0, im = 0.0;
      for (std::size_t l = 0; l < kLanes; ++l) {
        re += acc_c[l];
        im += acc_s[l];
      }
      out[k] = { re * inv_n, im * inv_n };
    }
  }
  if (count > 0)
    out[0] = { 1.0, 0.0 };
  return out;
}

Complex deconvolved_cf(std::span<const double> sample, double u, const CfFunction& noise_cf)
{
  const Complex noise = noise_cf(u);
  if (!(std::abs(noise) >= 1e-300))
    throw NumericError("deconvolved_cf: noise characteristic function vanishes at u=" +
                       std::to_string(u));
  return empirical_cf(sample, u) / noise;
}

} // namespace smalljump

namespace smalljump {

namespace {

// Gauss–Legendre nodes and weights on [0, 1].
void gauss_legendre_unit(int q, std::vector<double>& nodes, std::vector<double>& weights)
{
  nodes.assign(q, 0.0);
  weights.assign(q, 0.0);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

inline double es_kernel(double z, double beta)
{
  const double t = 1.0 - z * z;
  return t > 0.0 ? std::exp(beta * (std::sqrt(t) - 1.0)) : 0.0;
}

} // namespace

UniformEcfPlan::UniformEcfPlan(double step, std::size_t count) : step_(step), count_(count)
{
  if (!(step > 0.0))
    throw ValidationError("UniformEcfPlan: step must be > 0");
  if (count == 0)
    throw ValidationError("UniformEcfPlan: count must be >= 1");
  width_ = 16;
  beta_ = 2.30 * width_;
  // modes -count..count-1 oversampled twice
  grid_ = detail::fft_friendly_size(std::max<std::size_t>(4 * count, 2 * width_ + 2));
  const double dg = 2.0 * std::numbers::pi / static_cast<double>(grid_);
  const double half_width = 0.5 * width_ * dg;
  std::vector<double> z, wz;
  gauss_legendre_unit(3 * width_, z, wz);
  std::vector<double> phi(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    phi[i] = es_kernel(z[i], beta_);
  correction_.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    double acc = 0.0;
    const double ka = static_cast<double>(k) * half_width;
    for (std::size_t i = 0; i < z.size(); ++i)
      acc += wz[i] * phi[i] * std::cos(ka * z[i]);
    // F_k = Δg · B_k / ψ̂(k),  ψ̂(k) = 2a ∫_0^1 φ(z) cos(k a z) dz
    correction_[k] = dg / (2.0 * half_width * acc);
  }
}

std::vector<Complex> UniformEcfPlan::evaluate(std::span<const double> sample) const
{
  if (sample.empty())
    throw ValidationError("empirical characteristic function of an empty sample");
  const detail::RealFft fft(grid_);
  std::unique_ptr<double, detail::FftwDeleter> grid(detail::RealFft::allocate_real(grid_));
  std::unique_ptr<Complex, detail::FftwDeleter> spec(detail::RealFft::allocate_complex(grid_ / 2 + 1));
  double* b = grid.get();
  std::fill(b, b + grid_, 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  const double dg = two_pi / static_cast<double>(grid_);
  const double inv_dg = 1.0 / dg;
  const double half_width = 0.5 * width_ * dg;
  const double inv_half_width = 1.0 / half_width;
  const auto g = static_cast<std::ptrdiff_t>(grid_);
  for (double x : sample) {
    double theta = std::fmod(step_ * x, two_pi);
    if (theta < 0.0)
      theta += two_pi;
    const auto i0 = static_cast<std::ptrdiff_t>(std::ceil((theta - half_width) * inv_dg));
    for (int l = 0; l <= width_; ++l) {
      const std::ptrdiff_t i = i0 + l;
      const double zz = (static_cast<double>(i) * dg - theta) * inv_half_width;
      if (zz > 1.0)
        break;
      const std::ptrdiff_t wrapped = ((i % g) + g) % g;
      b[wrapped] += es_kernel(zz, beta_);
    }
  }
  fft.forward(b, spec.get());
  std::vector<Complex> out(count_);
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  for (std::size_t k = 0; k < count_; ++k)
    out[k] = std::conj(spec.get()[k]) * (correction_[k] * inv_n);
  out[0] = { 1.0, 0.0 };
  return out;
}

} // namespace smalljump
