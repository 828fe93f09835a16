#include "smalljump/models.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "smalljump/error.hpp"
#include "smalljump/quadrature.hpp"

namespace smalljump {

void TemperedStableParams::validate() const
{
  std::vector<std::string> problems;
  if (!(P >= 0.0))
    problems.emplace_back("P must be >= 0");
  if (!(Q >= 0.0))
    problems.emplace_back("Q must be >= 0");
  if (!(A >= 0.0))
    problems.emplace_back("A must be >= 0");
  if (!(B >= 0.0))
    problems.emplace_back("B must be >= 0");
  if (!(P + Q > 0.0))
    problems.emplace_back("P + Q must be > 0");
  if (!(alpha > 0.0 && alpha < 2.0))
    problems.emplace_back("alpha must lie in (0, 2)");
  if (!problems.empty()) {
    std::string msg = "invalid Lévy parameters:";
    for (const auto& p : problems)
      msg += " " + p + ";";
    throw ValidationError(msg);
  }
}

void ProcessConfig::validate() const
{
  std::string msg;
  try {
    params.validate();
  } catch (const ValidationError& e) {
    msg = e.what();
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    msg += " epsilon must lie in (0, 1];";
  if (!(delta > 0.0) || !std::isfinite(delta))
    msg += " delta must be > 0;";
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    msg += " sigma must be >= 0;";
  if (n < 1)
    msg += " n must be >= 1;";
  if (!msg.empty())
    throw ValidationError(msg);
}

std::string describe(const TemperedStableParams& p)
{
  std::ostringstream os;
  os.precision(17);
  os << "P=" << p.P << " Q=" << p.Q << " A=" << p.A << " B=" << p.B << " alpha=" << p.alpha;
  return os.str();
}

std::string describe(const ProcessConfig& c)
{
  std::ostringstream os;
  os.precision(17);
  os << describe(c.params) << " epsilon=" << c.epsilon << " delta=" << c.delta
     << " sigma=" << c.sigma << " n=" << c.n;
  return os.str();
}

double levy_density(const TemperedStableParams& params, double x)
{
  if (x == 0.0)
    throw ValidationError("levy_density: the density has a non-integrable pole at x = 0");
  const double ax = std::abs(x);
  const double power = std::pow(ax, -1.0 - params.alpha);
  return x > 0.0 ? params.P * power * std::exp(-params.A * ax)
                 : params.Q * power * std::exp(-params.B * ax);
}

OreyConstants orey_constants(const TemperedStableParams& params, double epsilon)
{
  params.validate();
  if (epsilon != 1.0)
    throw ValidationError("orey_constants: the constant M is only available for epsilon = 1");
  const double M =
    (params.P * std::exp(-params.A) + params.Q * std::exp(-params.B)) / (2.0 - params.alpha);
  return { M, params.alpha };
}

namespace {

constexpr quad::Options kMomentQuad{ 1e-12, 1e-300, 2000 };

// ∫_lo^hi x^beta e^{-a x} dx over 0 < lo < hi < ∞, computed in log-space.
double log_space_integral(double a, double beta, double lo, double hi)
{
  auto f = [=](double y) {
    const double x = std::exp(y);
    return std::exp((beta + 1.0) * y - a * x);
  };
  const double ylo = std::log(lo);
  const double yhi = std::log(hi);
  const int panels = std::max(1, static_cast<int>(std::ceil((yhi - ylo) / 2.0)));
  std::vector<double> bp(panels + 1);
  for (int i = 0; i <= panels; ++i)
    bp[i] = ylo + (yhi - ylo) * i / panels;
  auto r = quad::integrate(f, std::span<const double>(bp), kMomentQuad);
  return quad::require_converged(r, "side_moment").value;
}

} // namespace

double side_moment(double tempering, double alpha, double k, double lo, double hi)
{
  if (!(hi > lo))
    return 0.0;
  const double beta = k - 1.0 - alpha;
  const double expo = k - alpha; // antiderivative exponent
  if (tempering == 0.0) {
    if (std::isinf(hi) && expo >= 0.0)
      throw ValidationError("side_moment: divergent tail integral");
    if (lo == 0.0 && expo <= 0.0)
      throw ValidationError("side_moment: divergent integral at the origin");
    if (expo == 0.0)
      return std::log(hi / lo);
    const double upper = std::isinf(hi) ? 0.0 : std::pow(hi, expo);
    const double lower = lo == 0.0 ? 0.0 : std::pow(lo, expo);
    return (upper - lower) / expo;
  }
  if (lo == 0.0 && expo <= 0.0)
    throw ValidationError("side_moment: divergent integral at the origin");

  double total = 0.0;
  double start = lo;
  const double split = std::min(hi, 1.0);
  if (lo == 0.0) {
    auto r = quad::integrate_power_weight([=](double x) { return std::exp(-tempering * x); },
                                          beta, split, kMomentQuad);
    total += quad::require_converged(r, "side_moment").value;
    start = split;
  }
  if (start < hi) {
    // beyond this point e^{-a x} x^beta is below double precision relevance
    const double far = std::max(start, 800.0 / tempering);
    const double end = std::isinf(hi) ? far : hi;
    if (end > start)
      total += log_space_integral(tempering, beta, start, end);
  }
  return total;
}

double signed_moment(const TemperedStableParams& params, int k, double lo, double hi)
{
  const double pos = params.P == 0.0 ? 0.0 : params.P * side_moment(params.A, params.alpha, k, lo, hi);
  const double neg = params.Q == 0.0 ? 0.0 : params.Q * side_moment(params.B, params.alpha, k, lo, hi);
  return (k % 2 == 0) ? pos + neg : pos - neg;
}

double big_jump_intensity(const TemperedStableParams& params, double epsilon)
{
  params.validate();
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw ValidationError("big_jump_intensity: epsilon must lie in (0, 1]");
  if (params.is_stable())
    return (params.P + params.Q) / (params.alpha * std::pow(epsilon, params.alpha));
  return signed_moment(params, 0, epsilon, std::numeric_limits<double>::infinity());
}

double small_jump_drift(const TemperedStableParams& params, double epsilon)
{
  params.validate();
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw ValidationError("small_jump_drift: epsilon must lie in (0, 1]");
  if (params.is_symmetric())
    return 0.0;
  if (params.finite_variation())
    return signed_moment(params, 1, 0.0, epsilon);
  if (epsilon == 1.0)
    return 0.0;
  return -signed_moment(params, 1, epsilon, 1.0);
}

} // namespace smalljump
