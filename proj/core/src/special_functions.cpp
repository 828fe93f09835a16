#include "smalljump/special_functions.hpp"

#include <cmath>
#include <limits>

#include "smalljump/error.hpp"

namespace smalljump {

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEps = 1e-16;

// γ(a, s) by its power series; converges for all s but is used for s < a + 1.
double lower_series(double a, double s)
{
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < kMaxIterations; ++k) {
    term *= s / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps)
      return sum * std::exp(a * std::log(s) - s);
  }
  throw NumericError("incomplete_gamma: series did not converge");
}

// Γ(a, s) by the modified Lentz evaluation of the Legendre continued fraction.
double upper_continued_fraction(double a, double s)
{
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = s + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny)
      d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny)
      c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps)
      return std::exp(a * std::log(s) - s) * h;
  }
  throw NumericError("incomplete_gamma: continued fraction did not converge");
}

} // namespace

double incomplete_gamma(double a, double s)
{
  if (!(a > 0.0) || !(s >= 0.0))
    throw ValidationError("incomplete_gamma requires a > 0 and s >= 0");
  if (s == 0.0)
    return std::tgamma(a);
  if (std::isinf(s))
    return 0.0;
  if (s < a + 1.0)
    return std::tgamma(a) - lower_series(a, s);
  return upper_continued_fraction(a, s);
}

} // namespace smalljump
