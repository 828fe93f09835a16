#include "smalljump/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "smalljump/csv_io.hpp"
#include "smalljump/error.hpp"
#include "smalljump/parallel.hpp"
#include "smalljump/random.hpp"

namespace smalljump {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ∫_0^t f on the mesh u_k = k·step with the cutoff_weights rule, for many t.
class MeshIntegral
{
public:
  MeshIntegral(std::vector<double> f, double step) : f_(std::move(f)), step_(step), prefix_(f_.size(), 0.0)
  {
    for (std::size_t k = 1; k < f_.size(); ++k)
      prefix_[k] = prefix_[k - 1] + 0.5 * step_ * (f_[k - 1] + f_[k]);
  }

  double operator()(double t) const
  {
    auto full = static_cast<std::size_t>(std::floor(t / step_));
    double rest = t - static_cast<double>(full) * step_;
    if (rest < 1e-12 * step_)
      rest = 0.0;
    if (full >= f_.size() || (rest > 0.0 && full + 1 >= f_.size()))
      throw ValidationError("mesh integral beyond the tabulated range");
    double v = prefix_[full];
    if (rest > 0.0) {
      const double theta = rest / step_;
      v += 0.5 * rest * ((2.0 - theta) * f_[full] + theta * f_[full + 1]);
    }
    return v;
  }

private:
  std::vector<double> f_;
  double step_;
  std::vector<double> prefix_;
};

double sample_std(const std::vector<double>& v, double mean)
{
  if (v.size() < 2)
    return 0.0;
  double s = 0.0;
  for (double x : v)
    s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x;
  return v.empty() ? kNaN : s / static_cast<double>(v.size());
}

std::string lower(std::string_view s)
{
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

} // namespace

std::string_view to_string(CutoffMode mode)
{
  switch (mode) {
    case CutoffMode::Adaptive:
      return "adaptive";
    case CutoffMode::Fixed:
      return "fixed";
    case CutoffMode::Oracle:
      return "oracle";
  }
  return "unknown";
}

CutoffMode parse_cutoff_mode(std::string_view name)
{
  for (auto m : { CutoffMode::Adaptive, CutoffMode::Fixed, CutoffMode::Oracle })
    if (lower(name) == to_string(m))
      return m;
  throw ValidationError("unknown cutoff mode '" + std::string(name) +
                        "' (expected adaptive, fixed or oracle)");
}

void ExperimentSpec::validate() const
{
  std::string msg;
  try {
    config.validate();
  } catch (const ValidationError& e) {
    msg = e.what();
  }
  if (replications < 1)
    msg += " replications must be >= 1;";
  if (estimator_kind == EstimatorKind::Benchmark)
    msg += " estimator_kind cannot be benchmark;";
  if (cutoff.mode == CutoffMode::Adaptive && !(cutoff.kappa > 0.0))
    msg += " kappa must be > 0;";
  if (cutoff.mode == CutoffMode::Fixed && !(cutoff.m > 0.0))
    msg += " fixed cutoff m must be > 0;";
  if (benchmark_ell < 0.0)
    msg += " benchmark_ell must be >= 0 (0 selects the default);";
  if (!(truncation.eta > 0.0 && truncation.eta <= config.epsilon))
    msg += " trunc_eta must lie in (0, epsilon];";
  if (x_points < 16)
    msg += " x_points must be >= 16;";
  if (!(x_half_width > 0.0))
    msg += " x_half_width must be > 0;";
  if (!(grid_ratio > 1.0))
    msg += " grid_ratio must be > 1;";
  if (estimator_kind == EstimatorKind::GaussianNoise && !(config.sigma > 0.0))
    msg += " the gaussian-noise estimator requires sigma > 0; use known-noise;";
  if (!msg.empty())
    throw ValidationError(msg);
}

ExperimentContext::ExperimentContext(const ExperimentSpec& spec, unsigned threads) : spec_(spec)
{
  build(threads, nullptr);
}

ExperimentContext::ExperimentContext(const ExperimentSpec& spec, const ExperimentContext& other,
                                     unsigned threads)
  : spec_(spec)
{
  build(threads, &other);
}

bool ExperimentContext::shares_benchmark(const ExperimentSpec& spec) const
{
  const auto& p = spec.config.params;
  const auto& q = spec_.config.params;
  const double ell = spec.benchmark_ell > 0.0 ? spec.benchmark_ell : default_benchmark_ell(spec.config);
  return p.P == q.P && p.Q == q.Q && p.A == q.A && p.B == q.B && p.alpha == q.alpha &&
         spec.config.epsilon == spec_.config.epsilon && spec.config.delta == spec_.config.delta &&
         spec.x_points == spec_.x_points && spec.x_half_width == spec_.x_half_width && ell == ell_;
}

void ExperimentContext::build(unsigned threads, const ExperimentContext* other)
{
  spec_.validate();
  if (spec_.config.epsilon != 1.0)
    throw ValidationError("the benchmark needs epsilon = 1 (exact small-jump characteristic function)");
  const auto& config = spec_.config;
  const auto kind = spec_.estimator_kind;
  grid_ = default_x_grid(config, spec_.x_points, spec_.x_half_width);
  step_ = mesh_step(grid_);
  ell_ = spec_.benchmark_ell > 0.0 ? spec_.benchmark_ell : default_benchmark_ell(config);
  lambda_delta_ = big_jump_intensity(config.params, config.epsilon) * config.delta;

  const bool gaussian = kind == EstimatorKind::GaussianNoise;
  const double cap = gaussian ? gaussian_cutoff_cap(config.sigma, config.delta)
                              : std::numeric_limits<double>::infinity();
  const bool need_grid = spec_.cutoff.mode == CutoffMode::Adaptive || spec_.record_profile;
  double top = 0.0;
  if (need_grid) {
    cutoff_grid_ = CutoffGrid::geometric(config.epsilon, config.n, spec_.grid_ratio, cap);
    const double pen_lambda = kind == EstimatorKind::Direct ? 0.0 : lambda_delta_;
    penalties_ = penalties(cutoff_grid_, pen_lambda, config.n, spec_.cutoff.kappa,
                           gaussian ? config.sigma : 0.0, config.delta);
    top = cutoff_grid_.m_values.back();
  }
  if (spec_.cutoff.mode == CutoffMode::Fixed)
    fixed_m_ = spec_.cutoff.m;
  else if (spec_.cutoff.mode == CutoffMode::Oracle)
    fixed_m_ = oracle_cutoff(config);
  if (spec_.cutoff.mode != CutoffMode::Adaptive) {
    check_cutoff(config, kind, fixed_m_);
    top = std::max(top, fixed_m_);
  }
  mesh_count_ = cutoff_weights(step_, top).size();
  noise_ = tabulate_noise(config, kind, step_, mesh_count_, threads);
  for (std::size_t k = 0; k < mesh_count_; ++k)
    if (!(std::abs(noise_[k]) >= 1e-300))
      throw NumericError("noise characteristic function vanishes on the frequency mesh");

  const std::size_t ell_count = cutoff_weights(step_, ell_).size();
  if (other && other->shares_benchmark(spec_) && other->step_ == step_)
    benchmark_spectrum_ = other->benchmark_spectrum_;
  else
    benchmark_spectrum_ = std::make_shared<const std::vector<Complex>>(
      small_jump_spectrum(config, step_, ell_count, threads));
  benchmark_values_ = invert_spectrum(*benchmark_spectrum_, step_, cutoff_weights(step_, ell_), grid_);
  benchmark_norm_ = spectral_l2_norm_squared(*benchmark_spectrum_, step_, ell_);
  plan_ = std::make_shared<const UniformEcfPlan>(step_, mesh_count_);
}

ExperimentContext::Replication ExperimentContext::replicate(std::size_t r, bool keep_estimate) const
{
  const auto sample =
    sample_full_increments(spec_.config, derive_seed(spec_.base_seed, r), spec_.truncation);
  auto spectrum = plan_->evaluate(sample.values);
  for (std::size_t k = 0; k < mesh_count_; ++k)
    spectrum[k] /= noise_[k];

  Replication out{};
  std::vector<double> contrasts;
  if (spec_.cutoff.mode == CutoffMode::Adaptive) {
    contrasts = contrasts_from_spectrum(spectrum, step_, cutoff_grid_);
    out.m_hat = select_from_contrasts(cutoff_grid_, contrasts, penalties_, spec_.cutoff.kappa).m_hat;
  } else {
    out.m_hat = fixed_m_;
  }
  auto values = invert_spectrum(spectrum, step_, cutoff_weights(step_, out.m_hat), grid_);
  out.rel_l2 = relative_l2_error(values, benchmark_values_);
  if (keep_estimate)
    out.estimate = std::move(values);

  if (spec_.record_profile) {
    const auto& bench = *benchmark_spectrum_;
    const std::size_t common = std::min(bench.size(), spectrum.size());
    std::vector<double> diff(common), est2(spectrum.size()), bench2(bench.size());
    for (std::size_t k = 0; k < common; ++k)
      diff[k] = std::norm(spectrum[k] - bench[k]);
    for (std::size_t k = 0; k < spectrum.size(); ++k)
      est2[k] = std::norm(spectrum[k]);
    for (std::size_t k = 0; k < bench.size(); ++k)
      bench2[k] = std::norm(bench[k]);
    const MeshIntegral I_diff(std::move(diff), step_), I_est(std::move(est2), step_),
      I_bench(std::move(bench2), step_);
    auto risk = [&](double m) {
      double d = I_diff(std::min(m, ell_));
      if (m < ell_)
        d += I_bench(ell_) - I_bench(m);
      else if (m > ell_)
        d += I_est(m) - I_est(ell_);
      return d / kPi / benchmark_norm_;
    };
    out.profile.reserve(cutoff_grid_.m_values.size());
    for (double m : cutoff_grid_.m_values)
      out.profile.push_back(risk(m));
    out.profile_at_m_hat = risk(out.m_hat);
  }
  return out;
}

RiskReport run_monte_carlo(const ExperimentContext& context, const ExperimentSpec& spec, unsigned threads)
{
  const std::size_t R = spec.replications;
  std::vector<std::optional<ExperimentContext::Replication>> results(R);
  std::vector<std::string> errors(R);
  parallel_for(R, threads, [&](std::size_t r) {
    try {
      results[r] = context.replicate(r);
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  });

  RiskReport rep;
  std::vector<double> risks, ms, at_hat;
  rep.rel_l2.assign(R, kNaN);
  rep.m_hat.assign(R, kNaN);
  for (std::size_t r = 0; r < R; ++r) {
    if (!results[r]) {
      ++rep.failures;
      rep.errors.push_back("replication " + std::to_string(r) + ": " + errors[r]);
      continue;
    }
    const auto& x = *results[r];
    rep.rel_l2[r] = x.rel_l2;
    rep.m_hat[r] = x.m_hat;
    risks.push_back(x.rel_l2);
    ms.push_back(x.m_hat);
    if (spec.record_profile) {
      if (rep.profile_mean_risk.empty())
        rep.profile_mean_risk.assign(x.profile.size(), 0.0);
      for (std::size_t k = 0; k < x.profile.size(); ++k)
        rep.profile_mean_risk[k] += x.profile[k];
      at_hat.push_back(x.profile_at_m_hat);
    }
  }
  if (static_cast<double>(rep.failures) > 0.05 * static_cast<double>(R))
    throw NumericError(std::to_string(rep.failures) + " of " + std::to_string(R) +
                       " replications failed; first error: " + rep.errors.front());
  rep.replications = risks.size();
  rep.mean_rel_l2 = mean_of(risks);
  rep.std_rel_l2 = sample_std(risks, rep.mean_rel_l2);
  rep.mean_m_hat = mean_of(ms);
  rep.std_m_hat = sample_std(ms, rep.mean_m_hat);
  if (spec.record_profile) {
    for (double& v : rep.profile_mean_risk)
      v /= static_cast<double>(rep.replications);
    rep.profile_m = context.cutoff_grid().m_values;
    rep.mean_profile_risk_at_m_hat = mean_of(at_hat);
  }

  const auto& c = spec.config;
  auto& md = rep.metadata;
  md["P"] = format_double(c.params.P);
  md["Q"] = format_double(c.params.Q);
  md["A"] = format_double(c.params.A);
  md["B"] = format_double(c.params.B);
  md["alpha"] = format_double(c.params.alpha);
  md["epsilon"] = format_double(c.epsilon);
  md["delta"] = format_double(c.delta);
  md["sigma"] = format_double(c.sigma);
  md["n"] = std::to_string(c.n);
  md["estimator_kind"] = std::string(to_string(spec.estimator_kind));
  md["replications"] = std::to_string(spec.replications);
  md["base_seed"] = std::to_string(spec.base_seed);
  md["cutoff_mode"] = std::string(to_string(spec.cutoff.mode));
  md["kappa"] = format_double(spec.cutoff.kappa);
  if (spec.cutoff.mode != CutoffMode::Adaptive)
    md["cutoff_m"] = format_double(context.fixed_cutoff());
  md["benchmark_ell"] = format_double(context.ell());
  md["trunc_eta"] = format_double(c.params.is_stable() ? 0.0 : spec.truncation.eta);
  md["variance_matching"] = c.params.is_stable() ? "n/a" : (spec.truncation.variance_matching ? "true" : "false");
  md["x_half_width"] = format_double(spec.x_half_width);
  md["x_grid"] = "[" + format_double(context.x_grid().lo) + ", " + format_double(context.x_grid().hi) +
                 "] x " + std::to_string(context.x_grid().points);
  md["u_step"] = format_double(context.step());
  md["cutoff_grid"] = "geometric pi/(2 epsilon) * " + format_double(spec.grid_ratio) + "^k up to n";
  md["failures"] = std::to_string(rep.failures);
  return rep;
}

RiskReport run_monte_carlo(const ExperimentSpec& spec, unsigned threads)
{
  const ExperimentContext context(spec, threads);
  return run_monte_carlo(context, spec, threads);
}

SampleEstimate estimate_sample(std::span<const double> sample, const ExperimentSpec& spec, unsigned threads)
{
  ExperimentSpec local = spec;
  local.config.n = sample.size();
  local.record_profile = false;
  local.validate();
  const auto& config = local.config;
  const auto kind = local.estimator_kind;
  const auto grid = default_x_grid(config, local.x_points, local.x_half_width);
  const double step = mesh_step(grid);
  const bool gaussian = kind == EstimatorKind::GaussianNoise;

  SampleEstimate out;
  CutoffGrid cutoffs;
  double top = local.cutoff.m;
  if (local.cutoff.mode == CutoffMode::Adaptive) {
    const double cap = gaussian ? gaussian_cutoff_cap(config.sigma, config.delta)
                                : std::numeric_limits<double>::infinity();
    cutoffs = CutoffGrid::geometric(config.epsilon, config.n, local.grid_ratio, cap);
    top = cutoffs.m_values.back();
  } else if (local.cutoff.mode == CutoffMode::Oracle) {
    top = oracle_cutoff(config);
  }
  if (local.cutoff.mode != CutoffMode::Adaptive)
    check_cutoff(config, kind, top);

  const std::size_t count = cutoff_weights(step, top).size();
  auto spectrum = UniformEcfPlan(step, count).evaluate(sample);
  const auto noise = tabulate_noise(config, kind, step, count, threads);
  for (std::size_t k = 0; k < count; ++k) {
    if (!(std::abs(noise[k]) >= 1e-300))
      throw NumericError("noise characteristic function vanishes on the frequency mesh");
    spectrum[k] /= noise[k];
  }

  double m = top;
  if (local.cutoff.mode == CutoffMode::Adaptive) {
    const double lambda_delta =
      kind == EstimatorKind::Direct ? 0.0 : big_jump_intensity(config.params, config.epsilon) * config.delta;
    const auto pen = penalties(cutoffs, lambda_delta, config.n, local.cutoff.kappa,
                               gaussian ? config.sigma : 0.0, config.delta);
    const auto con = contrasts_from_spectrum(spectrum, step, cutoffs);
    out.selection = select_from_contrasts(cutoffs, con, pen, local.cutoff.kappa);
    m = out.selection->m_hat;
  }
  out.estimate = estimate_from_spectrum(kind, spectrum, step, m, grid);
  return out;
}

std::string_view to_string(TableId id)
{
  switch (id) {
    case TableId::T1:
      return "T1";
    case TableId::T2:
      return "T2";
    case TableId::T3:
      return "T3";
    case TableId::T4:
      return "T4";
    case TableId::T4Alt:
      return "T4-alt";
  }
  return "unknown";
}

TableId parse_table_id(std::string_view name)
{
  const std::string s = lower(name);
  for (auto id : { TableId::T1, TableId::T2, TableId::T3, TableId::T4, TableId::T4Alt })
    if (s == lower(to_string(id)))
      return id;
  throw ValidationError("unknown table id '" + std::string(name) + "' (expected T1, T2, T3, T4 or T4-alt)");
}

TemperedStableParams table_params(TableId id)
{
  switch (id) {
    case TableId::T1:
      return { 1.0, 1.0, 0.0, 0.0, 1.0 };
    case TableId::T2:
      return { 2.0, 0.0, 0.0, 0.0, 1.0 };
    case TableId::T3:
      return { 2.0, 0.0, 1.0, 0.0, 1.0 };
    case TableId::T4:
    case TableId::T4Alt:
      return { 1.0, 1.0, 0.0, 0.0, 1.0 };
  }
  return {};
}

namespace {

struct Ref
{
  double mean, std, m, m_std;
};

// Rows (alpha, n) in table order, columns Δ = 1, 0.1, 0.01.
using StableTable = std::array<std::array<std::array<Ref, 3>, 3>, 3>;

const StableTable kTable1 = { {
  { { { { { 4.21e-1, 0.36, 1.57, 0.02 }, { 2.30e-2, 0.01, 16.92, 3.19 }, { 2.65e-2, 0.01, 428.14, 87.22 } } },
      { { { 1.90e-1, 0.15, 1.57, 0.02 }, { 1.50e-2, 0.01, 19.30, 3.22 }, { 1.41e-2, 0.49e-2, 524.73, 80.92 } } },
      { { { 2.90e-2, 0.02, 1.58, 0.03 }, { 2.23e-3, 0.75e-3, 28.74, 3.47 }, { 1.82e-3, 0.54e-3, 821.53, 89.02 } } } } },
  { { { { { 1.18e-1, 0.13, 1.60, 0.10 }, { 1.12e-2, 0.01, 7.61, 1.40 }, { 1.24e-2, 0.58e-2, 62.05, 11.73 } } },
      { { { 5.74e-2, 0.06, 1.58, 0.06 }, { 6.51e-3, 3.40e-3, 8.47, 1.53 }, { 7.35e-3, 0.35e-2, 67.98, 11.06 } } },
      { { { 6.48e-3, 0.05, 1.58, 0.05 }, { 7.50e-4, 0.30e-3, 11.07, 1.24 }, { 7.62e-4, 0.30e-3, 91.09, 8.76 } } } } },
  { { { { { 7.78e-2, 0.06, 1.58, 0.06 }, { 7.19e-3, 0.68e-3, 3.04, 0.67 }, { 7.42e-3, 5.80e-3, 11.54, 2.20 } } },
      { { { 3.72e-2, 0.03, 1.57, 0.04 }, { 3.83e-3, 0.28e-3, 3.04, 0.24 }, { 4.48e-3, 2.80e-3, 12.97, 2.97 } } },
      { { { 3.90e-3, 0.01, 1.57, 0.04 }, { 8.6e-4, 0.50e-3, 3.73, 0.30 }, { 1.25e-3, 0.60e-3, 14.89, 2.08 } } } } },
} };

const StableTable kTable2 = { {
  { { { { { 3.48e-1, 0.27, 1.58, 0.03 }, { 3.76e-2, 1.50e-2, 15.91, 3.01 }, { 1.11e-1, 0.28e-1, 461.14, 76.86 } } },
      { { { 1.62e-1, 0.11, 1.58, 0.03 }, { 2.67e-2, 0.80e-2, 19.31, 2.69 }, { 9.90e-2, 0.17e-1, 527.81, 81.93 } } },
      { { { 5.14e-2, 0.03, 1.58, 0.05 }, { 1.90e-2, 0.24e-2, 29.16, 3.21 }, { 8.66e-2, 0.64e-2, 810.72, 78.32 } } } } },
  { { { { { 8.55e-2, 0.10, 1.59, 0.05 }, { 9.96e-3, 0.60e-3, 7.53, 1.41 }, { 1.06e-2, 0.60e-2, 60.95, 9.94 } } },
      { { { 4.11e-2, 0.05, 1.58, 0.05 }, { 5.57e-3, 0.30e-3, 8.32, 1.19 }, { 5.96e-3, 0.27e-2, 68.05, 11.17 } } },
      { { { 5.14e-3, 0.40e-2, 1.60, 0.10 }, { 7.51e-4, 0.30e-3, 11.14, 1.41 }, { 8.09e-4, 0.04e-2, 89.81, 9.62 } } } } },
  { { { { { 7.58e-2, 0.07, 1.59, 0.07 }, { 7.29e-3, 5.90e-3, 3.02, 0.58 }, { 8.14e-3, 0.75e-2, 11.69, 2.47 } } },
      { { { 3.28e-2, 0.02, 1.58, 0.05 }, { 3.95e-3, 2.50e-3, 3.12, 0.38 }, { 4.51e-3, 0.26e-2, 12.20, 1.72 } } },
      { { { 4.24e-3, 0.34e-2, 1.59, 0.08 }, { 8.82e-4, 0.50e-3, 3.82, 0.44 }, { 1.28e-3, 0.05e-2, 15.04, 1.57 } } } } },
} };

constexpr std::array<double, 3> kAlphas{ 0.7, 1.1, 1.7 };
constexpr std::array<std::size_t, 3> kSizes{ 500, 1000, 10000 };
constexpr std::array<double, 3> kDeltas{ 1.0, 0.1, 0.01 };

std::vector<TableCell> stable_cells(const StableTable& t)
{
  std::vector<TableCell> cells;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t d = 0; d < 3; ++d) {
        const Ref& r = t[a][i][d];
        cells.push_back({ kAlphas[a], kDeltas[d], kSizes[i], 0.0, r.mean, r.std, r.m, r.m_std });
      }
  return cells;
}

} // namespace

std::vector<TableCell> table_cells(TableId id)
{
  switch (id) {
    case TableId::T1:
      return stable_cells(kTable1);
    case TableId::T2:
      return stable_cells(kTable2);
    case TableId::T3:
      return { { 0.7, 1.0, 500, 0.0, 2.78e-2, 0.016, 2.44, 0.40 },
               { 0.7, 1.0, 1000, 0.0, 1.89e-2, 0.019, 2.63, 0.30 },
               { 1.1, 1.0, 500, 0.0, 9.43e-3, 0.007, 1.87, 0.27 },
               { 1.1, 1.0, 1000, 0.0, 4.62e-3, 0.002, 1.99, 0.24 } };
    case TableId::T4:
      return { { 1.0, 1.0, 5000, 0.0, 1.72e-2, 0.016, 1.597, 0.08 },
               { 1.0, 1.0, 5000, 0.2, 1.91e-2, 0.022, 1.596, 0.08 },
               { 1.0, 1.0, 5000, 0.5, 2.11e-2, 0.020, 1.582, 0.04 },
               { 1.0, 1.0, 5000, 1.0, 9.97e-2, 0.12, 1.589, 0.06 } };
    case TableId::T4Alt: {
      std::vector<TableCell> cells;
      for (double s : { 0.0, 0.2, 0.5, 1.0 })
        cells.push_back({ 1.0, 0.1, 5000, s, kNaN, kNaN, kNaN, kNaN });
      return cells;
    }
  }
  return {};
}

ExperimentSpec table_cell_spec(TableId id, const TableCell& cell, std::uint64_t base_seed)
{
  ExperimentSpec spec;
  spec.config.params = table_params(id);
  spec.config.params.alpha = cell.alpha;
  spec.config.epsilon = 1.0;
  spec.config.delta = cell.delta;
  spec.config.sigma = cell.sigma;
  spec.config.n = cell.n;
  spec.estimator_kind = cell.sigma > 0.0 ? EstimatorKind::GaussianNoise : EstimatorKind::KnownNoise;
  spec.replications = 100;
  spec.cutoff = { CutoffMode::Adaptive, kDefaultKappa, 0.0 };
  // one stream per cell, keyed by the cell's coordinates
  std::uint64_t key = derive_seed(base_seed, static_cast<std::uint64_t>(id));
  key = derive_seed(key, static_cast<std::uint64_t>(std::llround(cell.alpha * 1000.0)));
  key = derive_seed(key, static_cast<std::uint64_t>(std::llround(cell.delta * 1e6)));
  key = derive_seed(key, cell.n);
  key = derive_seed(key, static_cast<std::uint64_t>(std::llround(cell.sigma * 1000.0)));
  spec.base_seed = key;
  return spec;
}

std::vector<TableRow> reproduce_table(TableId id, std::uint64_t base_seed, unsigned threads,
                                      const std::function<bool(const TableCell&)>& filter,
                                      bool record_profile)
{
  std::vector<TableRow> rows;
  std::vector<std::unique_ptr<ExperimentContext>> cache; // one per benchmark configuration
  for (const auto& cell : table_cells(id)) {
    if (filter && !filter(cell))
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    auto spec = table_cell_spec(id, cell, base_seed);
    spec.record_profile = record_profile;
    const ExperimentContext* previous = nullptr;
    for (const auto& c : cache)
      if (c->shares_benchmark(spec))
        previous = c.get();
    auto context = previous ? std::make_unique<ExperimentContext>(spec, *previous, threads)
                            : std::make_unique<ExperimentContext>(spec, threads);
    TableRow row{ cell, run_monte_carlo(*context, spec, threads), kNaN };
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (std::isfinite(cell.ref_mean))
      row.z_score = std::abs(row.report.mean_rel_l2 - cell.ref_mean) / (cell.ref_std / 10.0);
    rows.push_back(std::move(row));
    if (!previous)
      cache.push_back(std::move(context));
  }
  return rows;
}

void write_table_csv(const std::vector<TableRow>& rows, std::ostream& out)
{
  CsvWriter w(out);
  w.header({ "alpha", "delta", "n", "sigma", "mean_rel_l2", "std_rel_l2", "mean_m_hat", "std_m_hat",
             "ref_mean", "ref_std", "z_score" });
  for (const auto& r : rows)
    w.row({ r.cell.alpha, r.cell.delta, static_cast<double>(r.cell.n), r.cell.sigma, r.report.mean_rel_l2,
            r.report.std_rel_l2, r.report.mean_m_hat, r.report.std_m_hat, r.cell.ref_mean,
            r.cell.ref_std, r.z_score });
}

std::vector<RateRow> rate_study(const RateStudySpec& spec, unsigned threads)
{
  if (spec.n_values.empty())
    throw ValidationError("rate_study: no sample sizes");
  std::vector<RateRow> rows;
  std::unique_ptr<ExperimentContext> first;
  for (const auto kind : spec.kinds) {
    for (std::size_t n : spec.n_values) {
      ExperimentSpec e;
      e.config = spec.config;
      e.config.n = n;
      e.estimator_kind = kind;
      e.replications = spec.replications;
      e.base_seed = derive_seed(spec.base_seed, n);
      e.cutoff.mode = CutoffMode::Oracle;
      auto context = first ? std::make_unique<ExperimentContext>(e, *first, threads)
                           : std::make_unique<ExperimentContext>(e, threads);
      const auto rep = run_monte_carlo(*context, e, threads);
      const double a = e.config.params.alpha;
      const double ld = big_jump_intensity(e.config.params, e.config.epsilon) * e.config.delta;
      const double rate = std::pow(std::log(static_cast<double>(n)) / e.config.delta, 1.0 / a) *
                          std::exp(4.0 * ld) / static_cast<double>(n);
      rows.push_back({ a, e.config.delta, n, kind, context->fixed_cutoff(), rep.mean_rel_l2, rep.std_rel_l2, rate });
      if (!first)
        first = std::move(context);
    }
  }
  return rows;
}

void write_rate_csv(const std::vector<RateRow>& rows, std::ostream& out)
{
  out << "alpha,delta,n,estimator,m,mean_rel_l2,std_rel_l2,rate\n";
  for (const auto& r : rows)
    out << format_double(r.alpha) << ',' << format_double(r.delta) << ',' << r.n << ',' << to_string(r.kind)
        << ',' << format_double(r.m) << ',' << format_double(r.mean_rel_l2) << ','
        << format_double(r.std_rel_l2) << ',' << format_double(r.rate) << '\n';
}

double log_log_slope(const std::vector<RateRow>& rows)
{
  if (rows.size() < 2)
    throw ValidationError("log_log_slope needs at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.n));
    const double y = std::log(r.mean_rel_l2);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

void write_plot_data(const ExperimentSpec& spec, std::size_t K, std::ostream& out, unsigned threads)
{
  const ExperimentContext context(spec, threads);
  K = std::min(K, spec.replications);
  std::vector<std::vector<double>> est(K);
  parallel_for(K, threads, [&](std::size_t r) { est[r] = context.replicate(r, true).estimate; });
  std::vector<std::string> header{ "x", "benchmark" };
  for (std::size_t r = 0; r < K; ++r)
    header.push_back("estimate_rep" + std::to_string(r + 1));
  CsvWriter w(out);
  w.header(header);
  const auto& g = context.x_grid();
  for (std::size_t i = 0; i < g.points; ++i) {
    std::vector<double> row{ g.at(i), context.benchmark()[i] };
    for (std::size_t r = 0; r < K; ++r)
      row.push_back(est[r][i]);
    w.row(row);
  }
}

} // namespace smalljump
