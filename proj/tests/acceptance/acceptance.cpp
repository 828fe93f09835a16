// Acceptance checks. Prints one PASS/FAIL line per criterion, preceded by
// indented detail lines. Exit status is 0 unless a check could not run, or
// --strict is given and a criterion failed.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "smalljump/charfn.hpp"
#include "smalljump/estimators.hpp"
#include "smalljump/experiments.hpp"
#include "smalljump/parallel.hpp"
#include "smalljump/random.hpp"
#include "smalljump/sampling.hpp"
#include "smalljump/selection.hpp"
#include "smalljump/special_functions.hpp"

using namespace smalljump;

namespace {

constexpr double kPi = std::numbers::pi;

unsigned g_threads = 1;
int g_failed = 0;

void detail(const std::string& text) { std::cout << "    " << text << "\n" << std::flush; }

void verdict(int id, const std::string& name, bool pass, const std::string& summary)
{
  if (!pass)
    ++g_failed;
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << summary << "\n"
            << std::flush;
}

std::string fmt(double v, int digits = 4)
{
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProcessConfig make_config(const TemperedStableParams& p, double delta, std::size_t n, double sigma = 0.0)
{
  ProcessConfig c;
  c.params = p;
  c.epsilon = 1.0;
  c.delta = delta;
  c.n = n;
  c.sigma = sigma;
  return c;
}

/// Every (params, Δ) of Tables 1 to 3.
std::vector<ProcessConfig> table_configs()
{
  std::vector<ProcessConfig> out;
  for (auto id : { TableId::T1, TableId::T2, TableId::T3 }) {
    for (const auto& cell : table_cells(id)) {
      auto p = table_params(id);
      p.alpha = cell.alpha;
      const auto c = make_config(p, cell.delta, cell.n);
      const bool seen = std::any_of(out.begin(), out.end(), [&](const ProcessConfig& o) {
        return o.params.P == c.params.P && o.params.Q == c.params.Q && o.params.A == c.params.A &&
               o.params.alpha == c.params.alpha && o.delta == c.delta;
      });
      if (!seen)
        out.push_back(c);
    }
  }
  return out;
}

std::string label(const ProcessConfig& c)
{
  return "P=" + fmt(c.params.P) + " Q=" + fmt(c.params.Q) + " A=" + fmt(c.params.A) + " alpha=" +
         fmt(c.params.alpha) + " delta=" + fmt(c.delta);
}

bool within_band(double value, double ref, double ref_std)
{
  return std::abs(value - ref) <= std::max(3.0 * ref_std / 10.0, 0.25 * ref);
}

std::vector<TableRow> g_t1_rows;

const TableRow* find_row(const std::vector<TableRow>& rows, double alpha, double delta, std::size_t n, double sigma)
{
  for (const auto& r : rows)
    if (r.cell.alpha == alpha && r.cell.delta == delta && r.cell.n == n && r.cell.sigma == sigma)
      return &r;
  return nullptr;
}

std::vector<TableRow> run_cells(TableId id, const std::function<bool(const TableCell&)>& keep)
{
  return reproduce_table(id, 7, g_threads, keep);
}

void criterion_table_reproduction()
{
  // T1 runs once with risk profiles; criteria 2 and 7 reuse it
  const auto t0 = std::chrono::steady_clock::now();
  g_t1_rows = reproduce_table(TableId::T1, 7, g_threads, {}, true);
  const double t1_seconds = seconds_since(t0);
  detail("T1: 27 cells, 100 replications each, " + fmt(t1_seconds, 3) + " s");

  // the runtime target is 2 min per cell on 8 cores; scale it to the cores here
  const double budget = 120.0 * 8.0 / static_cast<double>(std::max(1u, g_threads));
  bool all = true;
  int failing = 0;
  auto judge = [&](const TableRow& r, const char* table) {
    const double seconds = r.seconds;
    const bool ok = within_band(r.report.mean_rel_l2, r.cell.ref_mean, r.cell.ref_std);
    const bool fast = seconds <= budget;
    detail(std::string(table) + " alpha=" + fmt(r.cell.alpha) + " delta=" + fmt(r.cell.delta) + " n=" +
           std::to_string(r.cell.n) + " sigma=" + fmt(r.cell.sigma) + ": mean " + fmt(r.report.mean_rel_l2) +
           " (std " + fmt(r.report.std_rel_l2) + ") vs reference " + fmt(r.cell.ref_mean) + " (std " +
           fmt(r.cell.ref_std) + "), m_bar " + fmt(r.report.mean_m_hat) + " vs " + fmt(r.cell.ref_m_hat) +
           ", " + fmt(seconds, 3) + " s" + (ok ? "" : "  <- outside band") + (fast ? "" : "  <- over time budget"));
    if (!ok || !fast) {
      all = false;
      ++failing;
    }
  };
  auto check_m_bar = [&](const TableRow& r, const char* table) {
    const double band = 3.0 * r.cell.ref_m_hat_std / 10.0;
    const bool ok = std::abs(r.report.mean_m_hat - r.cell.ref_m_hat) <= band;
    detail(std::string(table) + " alpha=" + fmt(r.cell.alpha) + " n=" + std::to_string(r.cell.n) + ": m_bar " +
           fmt(r.report.mean_m_hat) + " vs " + fmt(r.cell.ref_m_hat) + " +- " + fmt(band) +
           (ok ? "" : "  <- outside band"));
    if (!ok) {
      all = false;
      ++failing;
    }
  };

  for (auto [a, d, n] : { std::tuple{ 0.7, 1.0, std::size_t{ 500 } }, std::tuple{ 1.1, 0.1, std::size_t{ 1000 } },
                          std::tuple{ 1.7, 0.01, std::size_t{ 10000 } } })
    if (const auto* r = find_row(g_t1_rows, a, d, n, 0.0))
      judge(*r, "T1");

  const auto t2 = run_cells(TableId::T2, [](const TableCell& c) { return c.alpha == 0.7 && c.delta == 0.01 && c.n == 10000; });
  for (const auto& r : t2) {
    judge(r, "T2");
    check_m_bar(r, "T2");
  }

  const auto t3 = run_cells(TableId::T3, [](const TableCell& c) {
    return (c.alpha == 0.7 && c.n == 500) || (c.alpha == 1.1 && c.n == 1000);
  });
  for (const auto& r : t3) {
    judge(r, "T3");
    check_m_bar(r, "T3");
  }

  const auto t4 = run_cells(TableId::T4, {});
  bool monotone = true;
  for (std::size_t i = 0; i < t4.size(); ++i) {
    if (t4[i].cell.sigma == 0.0 || t4[i].cell.sigma == 1.0)
      judge(t4[i], "T4");
    else
      detail("T4 sigma=" + fmt(t4[i].cell.sigma) + ": mean " + fmt(t4[i].report.mean_rel_l2) + " vs reference " +
             fmt(t4[i].cell.ref_mean));
    if (i > 0 && t4[i].report.mean_rel_l2 < t4[i - 1].report.mean_rel_l2)
      monotone = false;
  }
  detail(std::string("T4 risk nondecreasing in sigma: ") + (monotone ? "yes" : "no"));
  if (!monotone) {
    all = false;
    ++failing;
  }
  verdict(1, "table reproduction", all,
          all ? "all cells within max(3 SE, 25%)" : std::to_string(failing) + " check(s) failed, see details");
}

void criterion_selection_fidelity()
{
  bool ok = true;
  if (const auto* r = find_row(g_t1_rows, 0.7, 1.0, 500, 0.0)) {
    const bool in = r->report.mean_m_hat >= 1.50 && r->report.mean_m_hat <= 1.65;
    detail("T1 alpha=0.7 delta=1 n=500: m_bar " + fmt(r->report.mean_m_hat, 6) + " in [1.50, 1.65]: " +
           (in ? "yes" : "no"));
    ok = ok && in;
  } else {
    ok = false;
  }
  if (const auto* r = find_row(g_t1_rows, 0.7, 0.01, 500, 0.0)) {
    const double band = 3.0 * 87.22 / 10.0;
    const bool in = std::abs(r->report.mean_m_hat - 428.14) <= band;
    detail("T1 alpha=0.7 delta=0.01 n=500: m_bar " + fmt(r->report.mean_m_hat, 6) + " in 428.14 +- " + fmt(band) +
           ": " + (in ? "yes" : "no"));
    ok = ok && in;
  } else {
    ok = false;
  }
  verdict(2, "cutoff-selection fidelity", ok, ok ? "both mean cutoffs inside their bands" : "see details");
}

struct SamplerCase
{
  std::string name;
  ProcessConfig config;
  std::function<IncrementSample(std::uint64_t)> draw;
  std::function<Complex(double)> cf;
  double bias;
};

void criterion_sampler_oracle()
{
  constexpr std::size_t n = 100000;
  const TruncationOptions trunc{};
  std::vector<double> u;
  for (int k = 0; k <= 40; ++k)
    u.push_back(-10.0 + 0.5 * k);

  std::vector<SamplerCase> cases;
  {
    const auto c = make_config({ 2, 0, 0, 0, 0.7 }, 1.0, n);
    cases.push_back({ "stable", c, [c](std::uint64_t s) { return sample_stable_increments(c, s); },
                      [c](double v) { return cf_small_jumps(c, v) * cf_big_jumps(c, v); }, 0.0 });
  }
  {
    const auto c = make_config({ 2, 0, 1, 0, 0.7 }, 0.1, n);
    cases.push_back({ "tempered", c, [c, trunc](std::uint64_t s) { return sample_tempered_stable_increments(c, s, trunc); },
                      [c](double v) { return cf_small_jumps(c, v) * cf_big_jumps(c, v); },
                      truncation_cf_bias(c, trunc, 10.0) });
  }
  {
    const auto c = make_config({ 1, 1, 0, 0, 0.7 }, 1.0, n);
    cases.push_back({ "big jumps", c, [c](std::uint64_t s) { return sample_big_jump_increments(c, s); },
                      [c](double v) { return cf_big_jumps(c, v); }, 0.0 });
  }
  {
    const auto c = make_config({ 1, 1, 0, 0, 0.7 }, 0.1, n);
    cases.push_back({ "small jumps", c, [c, trunc](std::uint64_t s) { return sample_small_jump_increments(c, s, trunc); },
                      [c](double v) { return cf_small_jumps(c, v); }, truncation_cf_bias(c, trunc, 10.0) });
  }
  {
    const auto c = make_config({ 1, 1, 0, 0, 1.1 }, 0.1, n, 0.5);
    cases.push_back({ "full with Brownian part", c, [c](std::uint64_t s) { return sample_full_increments(c, s); },
                      [c](double v) { return cf_small_jumps(c, v) * cf_big_jumps(c, v) * cf_gaussian(c.sigma, c.delta, v); },
                      0.0 });
  }

  bool all = true;
  for (const auto& sc : cases) {
    std::vector<Complex> exact(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      exact[i] = sc.cf(u[i]);
    const double tol = 3.0 / std::sqrt(static_cast<double>(n)) + sc.bias;
    std::vector<double> sup(100);
    parallel_for(100, g_threads, [&](std::size_t s) {
      const auto sample = sc.draw(derive_seed(2024, s));
      double worst = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i)
        worst = std::max(worst, std::abs(empirical_cf(sample.values, u[i]) - exact[i]));
      sup[s] = worst;
    });
    const auto passed = std::count_if(sup.begin(), sup.end(), [&](double v) { return v <= tol; });
    const bool ok = passed >= 95;
    all = all && ok;
    detail(sc.name + " (" + label(sc.config) + " sigma=" + fmt(sc.config.sigma) + "): " + std::to_string(passed) +
           "/100 seeds within " + fmt(tol) + " (truncation bias " + fmt(sc.bias) + "), worst sup " +
           fmt(*std::max_element(sup.begin(), sup.end())));
  }
  verdict(3, "sampler correctness oracle", all, all ? "every sampler passes on >= 95 of 100 seeds" : "see details");
}

double tail_integral(const ProcessConfig& c, double m)
{
  // (1/π) ∫_m^U |φ_Z φ_B|², plus the envelope tail beyond U as an upper allowance
  const auto bound_at = [&](double x) { return theoretical_bounds(c, x, static_cast<double>(c.n)).bias_bound; };
  const double target = bound_at(m) * 1e-12;
  double U = 2.0 * m;
  while (bound_at(U) > target && U < 1e7)
    U *= 2.0;
  auto f = [&](double u) { return std::norm(cf_small_jumps(c, u) * cf_big_jumps(c, u)); };
  double sum = 0.0;
  for (double a = m; a < U; a *= 1.5) {
    const double b = std::min(U, a * 1.5);
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-10);
  }
  return sum / kPi + bound_at(U);
}

void criterion_bounds()
{
  const auto configs = table_configs();
  // (a) decay envelope
  std::vector<double> u;
  for (double v = kPi / 2.0; v <= 10.0; v += 0.25)
    u.push_back(v);
  for (double v = 10.0; v <= 1e4; v *= 1.05)
    u.push_back(v);
  int a_bad = 0;
  double a_ratio = 0.0;
  for (const auto& c : configs) {
    for (double v : u) {
      const double env = decay_bound(c, v);
      const double val = std::abs(cf_small_jumps(c, v) * cf_big_jumps(c, v));
      if (val > env * (1.0 + 1e-9) + 1e-300) {
        ++a_bad;
        detail("(a) violated at " + label(c) + " u=" + fmt(v) + ": " + fmt(val) + " > " + fmt(env));
      }
      if (env > 1e-300)
        a_ratio = std::max(a_ratio, val / env);
    }
  }
  detail("(a) " + std::to_string(configs.size()) + " configurations x " + std::to_string(u.size()) +
         " frequencies, max |phi_Z phi_B| / envelope = " + fmt(a_ratio));

  // (b) bias bound against the numerically integrated tail
  int b_bad = 0;
  for (const auto& c : configs) {
    std::string line = "(b) " + label(c) + ":";
    for (double m : { 5.0, 10.0, 20.0 }) {
      const double bound = theoretical_bounds(c, m, static_cast<double>(c.n)).bias_bound;
      const double tail = tail_integral(c, m);
      const bool ok = tail <= bound * (1.0 + 1e-9);
      if (!ok)
        ++b_bad;
      line += " m=" + fmt(m) + " tail " + fmt(tail, 3) + " <= " + fmt(bound, 3) + (ok ? "" : " NO");
    }
    detail(line);
  }

  // (c) benchmark sup norm
  int c_bad = 0;
  auto all_configs = configs;
  all_configs.push_back(make_config({ 1, 1, 0, 0, 1 }, 1.0, 5000));
  for (const auto& c : all_configs) {
    const auto grid = default_x_grid(c);
    const auto g = benchmark_density(c, default_benchmark_ell(c), grid, g_threads);
    const double sup = *std::max_element(g.values.begin(), g.values.end());
    const double bound = sup_norm_bound(c);
    const bool ok = sup <= bound;
    if (!ok)
      ++c_bad;
    detail("(c) " + label(c) + ": sup g " + fmt(sup) + " <= " + fmt(bound) + (ok ? "" : " NO"));
  }
  const bool pass = a_bad == 0 && b_bad == 0 && c_bad == 0;
  verdict(4, "bound verification", pass,
          pass ? "decay, bias and sup-norm bounds hold on all table configurations"
               : std::to_string(a_bad) + " decay, " + std::to_string(b_bad) + " bias, " + std::to_string(c_bad) +
                   " sup-norm violations");
}

void criterion_parseval()
{
  std::vector<double> worst(10);
  std::vector<std::string> lines(10);
  const std::vector<TemperedStableParams> params{ { 1, 1, 0, 0, 0.7 }, { 2, 0, 0, 0, 1.1 }, { 1, 1, 0, 0, 1.7 },
                                                  { 2, 0, 1, 0, 0.7 }, { 1, 1, 0, 0, 1 } };
  for (std::size_t i = 0; i < 10; ++i) {
    Rng rng(derive_seed(555, i));
    const auto& p = params[i % params.size()];
    const double delta = i < 5 ? 1.0 : 0.1;
    const auto c = make_config(p, delta, 1000);
    const double m = kPi / 2.0 + 8.0 * rng.uniform(0.0, 1.0);
    const auto sample = sample_full_increments(c, derive_seed(556, i));
    const auto nf = noise_cf(c, EstimatorKind::KnownNoise);
    const double q = contrast(sample.values, m, nf);
    const auto coef = sinc_basis_coefficients(sample.values, m, 10000, nf);
    double energy = 0.0;
    for (const auto& a : coef)
      energy += std::norm(a);
    worst[i] = std::abs(q + energy) / std::abs(q);
    lines[i] = label(c) + " m=" + fmt(m) + ": contrast " + fmt(q, 10) + ", -sum|a_j|^2 " + fmt(-energy, 10) +
               ", relative gap " + fmt(worst[i], 3);
    if (worst[i] > 1e-5) {
      // the sinc lattice jπ/m, |j| <= 10^4, stops at |x| = 10^4 π/m
      const double reach = 10000.0 * kPi / m;
      const auto far = std::count_if(sample.values.begin(), sample.values.end(),
                                     [&](double x) { return std::abs(x) > reach; });
      double wide = 0.0;
      for (const auto& a : sinc_basis_coefficients(sample.values, m, 100000, nf))
        wide += std::norm(a);
      lines[i] += "; " + std::to_string(far) + " sample points beyond |x| = " + fmt(reach) +
                  ", gap with |j| <= 10^5: " + fmt(std::abs(q + wide) / std::abs(q), 3);
    }
  }
  for (const auto& l : lines)
    detail(l);
  const double w = *std::max_element(worst.begin(), worst.end());
  verdict(5, "Parseval/contrast identity", w <= 1e-5, "max relative gap " + fmt(w, 3) + " (limit 1e-5)");
}

void criterion_degenerate()
{
  bool ok = true;
  const std::vector<double> zeros(1000, 0.0);
  const CfFunction one = [](double) { return Complex(1.0, 0.0); };
  double zmax = 0.0;
  for (double m : { kPi / 2.0, 3.0, 10.0, 57.3 })
    zmax = std::max(zmax, std::abs(contrast(zeros, m, one) + m / kPi));
  detail("zero-sample contrast: max |contrast + m/pi| = " + fmt(zmax, 3));
  ok = ok && zmax <= 1e-10;

  const auto c = make_config({ 0.5, 0.5, 0, 0, 1 }, 1.0, 2981);
  const auto b = theoretical_bounds(c, 1.0, std::exp(8.0));
  const double mgap = b.m_star ? std::abs(*b.m_star - kPi) : std::numeric_limits<double>::infinity();
  detail("M = " + fmt(b.M, 17) + ", lambda Delta = " + fmt(b.lambda, 17) + ", |m* - pi| = " + fmt(mgap, 3));
  ok = ok && mgap <= 1e-12;

  const double ggap = std::abs(incomplete_gamma(1.0, 2.0) - std::exp(-2.0));
  detail("|Gamma(1, 2) - e^-2| = " + fmt(ggap, 3));
  ok = ok && ggap <= 1e-12;

  double rmax = 0.0;
  for (double sigma : { 0.2, 0.5, 1.0, 2.0 }) {
    for (double delta : { 0.1, 1.0 }) {
      const auto cb = make_config({ 1, 1, 0, 0, 1 }, delta, 5000, sigma);
      const auto r = theoretical_bounds(cb, 1.0, 5000.0);
      if (!r.m_star)
        continue;
      const double m = *r.m_star;
      const double c_lambda = kPi * r.c * r.C * std::exp(-4.0 * r.lambda * delta);
      const double lhs = std::exp(sigma * sigma * delta * m * m + r.c * delta * m);
      rmax = std::max(rmax, std::abs(lhs / (c_lambda * 5000.0) - 1.0));
    }
  }
  detail("Brownian m*: max relative residual of e^{sigma^2 Delta m^2 + c Delta m} = c_lambda n: " + fmt(rmax, 3));
  ok = ok && rmax <= 1e-9;
  verdict(6, "degenerate-input exactness", ok, ok ? "all four identities hold" : "see details");
}

void criterion_oracle_inequality()
{
  bool all = true;
  int bad = 0;
  for (const auto& r : g_t1_rows) {
    const auto& prof = r.report.profile_mean_risk;
    const double best = *std::min_element(prof.begin(), prof.end());
    const double limit = 3.0 * best + 10.0 / static_cast<double>(r.cell.n);
    const bool ok = r.report.mean_profile_risk_at_m_hat <= limit;
    if (!ok) {
      all = false;
      ++bad;
    }
    detail("T1 alpha=" + fmt(r.cell.alpha) + " delta=" + fmt(r.cell.delta) + " n=" + std::to_string(r.cell.n) +
           ": risk at m_hat " + fmt(r.report.mean_profile_risk_at_m_hat) + ", best fixed " + fmt(best) +
           ", limit " + fmt(limit) + (ok ? "" : "  <- violated"));
  }
  verdict(7, "oracle inequality", all,
          all ? "adaptive risk within 3 x best fixed + 10/n on all 27 T1 cells"
              : std::to_string(bad) + " of " + std::to_string(g_t1_rows.size()) + " cells violate the inequality");
}

void criterion_rate()
{
  RateStudySpec spec;
  spec.config = make_config({ 1, 1, 0, 0, 1 }, 1.0, 500);
  spec.n_values = { 500, 2000, 8000, 32000 };
  spec.kinds = { EstimatorKind::KnownNoise };
  spec.replications = 100;
  spec.base_seed = 11;
  const auto rows = rate_study(spec, g_threads);
  for (const auto& r : rows)
    detail("n=" + std::to_string(r.n) + " m=" + fmt(r.m) + " mean risk " + fmt(r.mean_rel_l2) + " (std " +
           fmt(r.std_rel_l2) + "), rate " + fmt(r.rate));
  const double slope = log_log_slope(rows);
  const bool ok = slope >= -1.2 && slope <= -0.8;
  verdict(8, "rate check", ok, "log-log slope " + fmt(slope) + " (target [-1.2, -0.8])");
}

std::string slurp(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

void criterion_determinism()
{
  const std::string cli = SMALLJUMP_CLI_PATH;
  const std::string a = "determinism_t1_threads1.csv";
  const std::string b = "determinism_t1_threads8.csv";
  auto run = [&](unsigned threads, const std::string& out) {
    const std::string cmd = cli + " table T1 --seed 7 --threads " + std::to_string(threads) + " --out " + out + " > /dev/null";
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = std::system(cmd.c_str());
    detail("table T1 --seed 7 --threads " + std::to_string(threads) + ": exit " + std::to_string(rc) + ", " +
           fmt(seconds_since(t0), 3) + " s");
    return rc == 0;
  };
  const bool ran = run(1, a) && run(8, b);
  const auto ta = slurp(a);
  const auto tb = slurp(b);
  const bool same = ran && !ta.empty() && ta == tb;
  detail("sizes " + std::to_string(ta.size()) + " and " + std::to_string(tb.size()) + " bytes");
  verdict(9, "determinism", same, same ? "1-thread and 8-thread CSVs are byte-identical" : "CSVs differ or a run failed");
}

} // namespace

int main(int argc, char** argv)
{
  bool strict = false;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--strict")
      strict = true;
  g_threads = resolve_threads(0);
  std::cout << "acceptance run with " << g_threads << " worker thread(s)\n";
  const std::vector<std::pair<const char*, void (*)()>> steps{
    { "1", criterion_table_reproduction }, { "2", criterion_selection_fidelity }, { "3", criterion_sampler_oracle },
    { "4", criterion_bounds },             { "5", criterion_parseval },           { "6", criterion_degenerate },
    { "7", criterion_oracle_inequality },  { "8", criterion_rate },               { "9", criterion_determinism },
  };
  int errors = 0;
  for (const auto& [id, fn] : steps) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const std::exception& e) {
      ++errors;
      std::cout << "FAIL criterion " << id << ": could not run: " << e.what() << "\n";
    }
    detail("criterion " + std::string(id) + " took " + fmt(seconds_since(t0), 3) + " s");
  }
  std::cout << "summary: " << (9 - g_failed - errors) << " of 9 criteria pass\n";
  if (errors > 0)
    return 1;
  return strict && g_failed > 0 ? 1 : 0;
}
