#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "smalljump/error.hpp"

namespace smalljump::quad {

struct Options
{
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_intervals = 4000;
};

template<class T>
struct Result
{
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> xgk = {
  0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
  0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
  0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
  0.207784955007898467600689403773245, 0.000000000000000000000000000000000
};
inline constexpr std::array<double, 8> wgk = {
  0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
  0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
  0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
  0.204432940075298892414161999234649, 0.209482141084727828012999174891714
};
inline constexpr std::array<double, 4> wg = {
  0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
  0.381830050505118944950369775488975, 0.417959183673469387755102040816327
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template<class T>
struct Panel
{
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template<class F>
auto gk15(F& f, double a, double b)
{
  using T = std::decay_t<decltype(f(a))>;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * wgk[7];
  T gauss = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    const T sum = f(center - dx) + f(center + dx);
    kronrod += sum * wgk[j];
    if (j % 2 == 1)
      gauss += sum * wg[j / 2];
  }
  return Panel<T>{ a, b, kronrod * half, magnitude((kronrod - gauss) * half) };
}

} // namespace detail

//! Globally adaptive Gauss-Kronrod (7/15) quadrature over the panels delimited
//! by `breakpoints` (sorted, at least two entries). Works for real and complex
//! integrands. Never throws; check `converged`.
template<class F>
auto integrate(F f, std::span<const double> breakpoints, const Options& opt = {})
  -> Result<std::decay_t<decltype(f(0.0))>>
{
  using T = std::decay_t<decltype(f(0.0))>;
  Result<T> out;
  std::priority_queue<detail::Panel<T>> heap;
  T total{};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i]))
      continue;
    auto p = detail::gk15(f, breakpoints[i], breakpoints[i + 1]);
    out.evaluations += 15;
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  int intervals = static_cast<int>(heap.size());
  auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)); };
  while (err > tolerance() && intervals < opt.max_intervals && !heap.empty()) {
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // panel cannot be split further in double precision
      heap.push(worst);
      break;
    }
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // re-sum to shed the drift of the incremental updates
  T resum{};
  double reerr = 0.0;
  while (!heap.empty()) {
    resum += heap.top().value;
    reerr += heap.top().error;
    heap.pop();
  }
  out.value = resum;
  out.error = reerr;
  out.converged = reerr <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(resum));
  return out;
}

template<class F>
auto integrate(F f, double a, double b, const Options& opt = {})
{
  const std::array<double, 2> bp{ a, b };
  return integrate(std::move(f), std::span<const double>(bp), opt);
}

//! Integrates x^beta * g(x) over [0, b] for beta > -1 and smooth g, using the
//! substitution t = x^(1+beta) which makes the transformed integrand bounded.
template<class G>
auto integrate_power_weight(G g, double beta, double b, const Options& opt = {})
{
  const double p = 1.0 + beta;
  const double inv_p = 1.0 / p;
  auto h = [&](double t) { return g(std::pow(t, inv_p)); };
  auto r = integrate(h, 0.0, std::pow(b, p), opt);
  r.value *= inv_p;
  r.error *= inv_p;
  return r;
}

//! Throws NumericError when a quadrature result did not converge.
template<class T>
const Result<T>& require_converged(const Result<T>& r, const std::string& what)
{
  if (!r.converged)
    throw NumericError(what + ": quadrature did not converge (error estimate " +
                       std::to_string(r.error) + ")");
  return r;
}

} // namespace smalljump::quad
