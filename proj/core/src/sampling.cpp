#include "smalljump/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "smalljump/csv_io.hpp"
#include "smalljump/error.hpp"
#include "smalljump/random.hpp"

namespace smalljump {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream offsets within one sample seed.
constexpr std::uint64_t kJumpStream = 0;
constexpr std::uint64_t kGaussianStream = 1;

IncrementSample make_sample(const ProcessConfig& config, std::uint64_t seed, std::string generator)
{
  IncrementSample s;
  s.seed = seed;
  s.config = config;
  s.generator = std::move(generator);
  s.values.reserve(config.n);
  return s;
}

// Standard S_α(1, β, 0) variate (Samorodnitsky–Taqqu parametrization).
double standard_stable(Rng& rng, double alpha, double beta)
{
  constexpr double half_pi = 0.5 * std::numbers::pi;
  const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double w = rng.exponential();
  if (alpha == 1.0) {
    const double a = half_pi + beta * v;
    return (a * std::tan(v) - beta * std::log(half_pi * w * std::cos(v) / a)) / half_pi;
  }
  const double t = beta * std::tan(half_pi * alpha);
  const double b = std::atan(t) / alpha;
  const double s = std::pow(1.0 + t * t, 0.5 / alpha);
  const double av = alpha * (v + b);
  return s * std::sin(av) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos(v - av) / w, (1.0 - alpha) / alpha);
}

// Magnitude of one jump with density ∝ x^(-1-α) e^(-a x) on (lo, hi].
// Proposal from the (truncated) Pareto law, acceptance e^{-a (x - lo)}.
double jump_magnitude(Rng& rng, double alpha, double a, double lo, double hi)
{
  const double lo_pow = std::pow(lo, -alpha);
  const double hi_pow = std::isinf(hi) ? 0.0 : std::pow(hi, -alpha);
  for (;;) {
    const double u = rng.uniform_open();
    double x = std::pow(lo_pow - u * (lo_pow - hi_pow), -1.0 / alpha);
    x = std::min(std::max(x, lo), hi);
    if (a == 0.0 || rng.uniform_open() <= std::exp(-a * (x - lo)))
      return x;
  }
}

// Compound Poisson sum over jumps with lo < |x| <= hi.
struct JumpBand
{
  double rate_pos = 0.0;
  double rate_neg = 0.0;
  double lo = 0.0;
  double hi = kInf;

  JumpBand(const TemperedStableParams& p, double lo_, double hi_) : lo(lo_), hi(hi_)
  {
    if (p.P > 0.0)
      rate_pos = p.P * side_moment(p.A, p.alpha, 0.0, lo, hi);
    if (p.Q > 0.0)
      rate_neg = p.Q * side_moment(p.B, p.alpha, 0.0, lo, hi);
  }

  double total() const { return rate_pos + rate_neg; }

  double draw(Rng& rng, const TemperedStableParams& p, double delta) const
  {
    const double rate = total();
    if (rate == 0.0)
      return 0.0;
    const std::uint64_t count = rng.poisson(delta * rate);
    const double p_pos = rate_pos / rate;
    double sum = 0.0;
    for (std::uint64_t i = 0; i < count; ++i) {
      if (rng.uniform_open() < p_pos)
        sum += jump_magnitude(rng, p.alpha, p.A, lo, hi);
      else
        sum -= jump_magnitude(rng, p.alpha, p.B, lo, hi);
    }
    return sum;
  }
};

// Drift per unit time that replaces the jumps below eta, given that jumps
// in eta < |x| <= upper are simulated.
double truncation_drift(const TemperedStableParams& p, double eta)
{
  if (p.is_symmetric())
    return 0.0;
  if (p.finite_variation())
    return signed_moment(p, 1, 0.0, eta);
  return -signed_moment(p, 1, eta, 1.0);
}

void check_truncation(const ProcessConfig& config, const TruncationOptions& trunc, bool strict)
{
  if (!(trunc.eta > 0.0))
    throw ValidationError("trunc_eta must be > 0");
  if (strict ? !(trunc.eta < config.epsilon) : !(trunc.eta <= config.epsilon))
    throw ValidationError(strict ? "trunc_eta must be < epsilon" : "trunc_eta must be <= epsilon");
}

// Draws with jumps in (eta, hi] replaced below eta by drift (+ Gaussian).
IncrementSample approximate_jumps(const ProcessConfig& config, std::uint64_t seed,
                                  const TruncationOptions& trunc, double hi, std::string name)
{
  const auto& p = config.params;
  const JumpBand band(p, trunc.eta, hi);
  const double drift = config.delta * truncation_drift(p, trunc.eta);
  const double sd =
    trunc.variance_matching ? std::sqrt(config.delta * signed_moment(p, 2, 0.0, trunc.eta)) : 0.0;
  auto s = make_sample(config, seed, std::move(name));
  s.trunc_eta = trunc.eta;
  s.variance_matching = trunc.variance_matching;
  Rng rng(derive_seed(seed, kJumpStream));
  for (std::size_t j = 0; j < config.n; ++j) {
    double x = drift + band.draw(rng, p, config.delta);
    if (sd > 0.0)
      x += sd * rng.normal();
    s.values.push_back(x);
  }
  return s;
}

} // namespace

StableParametrization stable_parametrization(const TemperedStableParams& params)
{
  const double a = params.alpha;
  const double mass = params.P + params.Q;
  const double beta = (params.P - params.Q) / mass;
  double scale_pow;
  if (a == 1.0)
    scale_pow = mass * 0.5 * std::numbers::pi;
  else
    scale_pow = -mass * std::tgamma(-a) * std::cos(0.5 * std::numbers::pi * a);
  return { std::pow(scale_pow, 1.0 / a), beta };
}

IncrementSample sample_stable_increments(const ProcessConfig& config, std::uint64_t seed)
{
  config.validate();
  const auto& p = config.params;
  if (!p.is_stable())
    throw ValidationError("sample_stable_increments requires A = B = 0");
  const auto [scale, beta] = stable_parametrization(p);
  const double a = p.alpha;
  const double d = config.delta;
  double mult, shift;
  if (a == 1.0) {
    // X_Δ = Δ (σ S + (2/π) β σ log σ) + Δ (μ + (P - Q) log Δ)
    const double mu = (p.P - p.Q) * (1.0 - std::numbers::egamma);
    mult = d * scale;
    shift = d * (2.0 / std::numbers::pi * beta * scale * std::log(scale) + mu + (p.P - p.Q) * std::log(d));
  } else {
    mult = std::pow(d, 1.0 / a) * scale;
    shift = a > 1.0 ? d * (p.P - p.Q) / (a - 1.0) : 0.0;
  }
  auto s = make_sample(config, seed, "stable");
  Rng rng(derive_seed(seed, kJumpStream));
  for (std::size_t j = 0; j < config.n; ++j)
    s.values.push_back(mult * standard_stable(rng, a, beta) + shift);
  return s;
}

IncrementSample sample_tempered_stable_increments(const ProcessConfig& config, std::uint64_t seed,
                                                  const TruncationOptions& trunc)
{
  config.validate();
  if (config.params.is_stable())
    throw ValidationError("sample_tempered_stable_increments requires A > 0 or B > 0; use the "
                          "exact stable sampler");
  check_truncation(config, trunc, false);
  return approximate_jumps(config, seed, trunc, kInf, "tempered_compound_poisson");
}

IncrementSample sample_big_jump_increments(const ProcessConfig& config, std::uint64_t seed)
{
  config.validate();
  const auto& p = config.params;
  const JumpBand band(p, config.epsilon, kInf);
  auto s = make_sample(config, seed, "big_jumps");
  Rng rng(derive_seed(seed, kJumpStream));
  for (std::size_t j = 0; j < config.n; ++j)
    s.values.push_back(band.draw(rng, p, config.delta));
  return s;
}

IncrementSample sample_small_jump_increments(const ProcessConfig& config, std::uint64_t seed,
                                             const TruncationOptions& trunc)
{
  config.validate();
  check_truncation(config, trunc, true);
  return approximate_jumps(config, seed, trunc, config.epsilon, "small_jumps_compound_poisson");
}

IncrementSample sample_full_increments(const ProcessConfig& config, std::uint64_t seed,
                                       const TruncationOptions& trunc)
{
  IncrementSample s = config.params.is_stable() ? sample_stable_increments(config, seed)
                                                : sample_tempered_stable_increments(config, seed, trunc);
  if (config.sigma > 0.0) {
    Rng rng(derive_seed(seed, kGaussianStream));
    const double sd = config.sigma * std::sqrt(config.delta);
    for (double& v : s.values)
      v += sd * rng.normal();
  }
  return s;
}

double truncation_cf_bias(const ProcessConfig& config, const TruncationOptions& trunc, double u_max)
{
  config.validate();
  const auto& p = config.params;
  const double u = std::abs(u_max);
  // |e^{iux} - 1 - iux + u²x²/2| <= |ux|³/6 and |e^{iux} - 1 - iux| <= u²x²/2
  if (trunc.variance_matching) {
    const double third = (p.P > 0.0 ? p.P * side_moment(p.A, p.alpha, 3.0, 0.0, trunc.eta) : 0.0) +
                         (p.Q > 0.0 ? p.Q * side_moment(p.B, p.alpha, 3.0, 0.0, trunc.eta) : 0.0);
    return config.delta * u * u * u * third / 6.0;
  }
  return config.delta * u * u * signed_moment(p, 2, 0.0, trunc.eta) / 2.0;
}

void write_sample_csv(const IncrementSample& sample, const std::string& path)
{
  auto out = open_output(path);
  CsvWriter w(out);
  const auto& c = sample.config;
  w.metadata("generator", sample.generator);
  w.metadata("seed", std::to_string(sample.seed));
  w.metadata("P", format_double(c.params.P));
  w.metadata("Q", format_double(c.params.Q));
  w.metadata("A", format_double(c.params.A));
  w.metadata("B", format_double(c.params.B));
  w.metadata("alpha", format_double(c.params.alpha));
  w.metadata("epsilon", format_double(c.epsilon));
  w.metadata("delta", format_double(c.delta));
  w.metadata("sigma", format_double(c.sigma));
  w.metadata("n", std::to_string(c.n));
  w.metadata("trunc_eta", format_double(sample.trunc_eta));
  w.metadata("variance_matching", sample.variance_matching ? "true" : "false");
  w.header({ "value" });
  for (double v : sample.values)
    w.row({ v });
  if (!out)
    throw ValidationError("failed writing " + path);
}

IncrementSample read_sample_csv(const std::string& path)
{
  const auto table = read_csv(path);
  const std::size_t col = table.column("value");
  IncrementSample s;
  auto get = [&](const std::string& key, double fallback) {
    const auto it = table.metadata.find(key);
    return it == table.metadata.end() ? fallback : std::stod(it->second);
  };
  auto& c = s.config;
  c.params.P = get("P", c.params.P);
  c.params.Q = get("Q", c.params.Q);
  c.params.A = get("A", c.params.A);
  c.params.B = get("B", c.params.B);
  c.params.alpha = get("alpha", c.params.alpha);
  c.epsilon = get("epsilon", c.epsilon);
  c.delta = get("delta", c.delta);
  c.sigma = get("sigma", c.sigma);
  s.trunc_eta = get("trunc_eta", 0.0);
  if (const auto it = table.metadata.find("seed"); it != table.metadata.end())
    s.seed = std::stoull(it->second);
  if (const auto it = table.metadata.find("generator"); it != table.metadata.end())
    s.generator = it->second;
  if (const auto it = table.metadata.find("variance_matching"); it != table.metadata.end())
    s.variance_matching = it->second == "true";
  for (const auto& row : table.rows)
    s.values.push_back(row[col]);
  if (s.values.empty())
    throw ValidationError(path + ": no sample values");
  c.n = s.values.size();
  c.validate();
  return s;
}

} // namespace smalljump
