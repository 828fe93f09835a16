#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smalljump/error.hpp"
#include "smalljump/estimators.hpp"
#include "smalljump/experiments.hpp"
#include "smalljump/sampling.hpp"

using namespace smalljump;

namespace {

ExperimentSpec small_spec(std::size_t n = 300, std::size_t reps = 6)
{
  ExperimentSpec spec;
  spec.config.params = { 1, 1, 0, 0, 1.1 };
  spec.config.delta = 0.5;
  spec.config.n = n;
  spec.replications = reps;
  spec.base_seed = 99;
  spec.x_points = 256;
  spec.benchmark_ell = 40.0;
  return spec;
}

std::string first_line(const std::string& text)
{
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind('#', 0) != 0)
      return line;
  return {};
}

} // namespace

TEST_CASE("cutoff mode and table id names")
{
  for (auto m : { CutoffMode::Adaptive, CutoffMode::Fixed, CutoffMode::Oracle })
    CHECK(parse_cutoff_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_cutoff_mode("best"), ValidationError);
  CHECK(parse_table_id("t4-alt") == TableId::T4Alt);
  CHECK(parse_table_id("T2") == TableId::T2);
  CHECK_THROWS_AS(parse_table_id("T5"), ValidationError);
}

TEST_CASE("table lattices")
{
  CHECK(table_cells(TableId::T1).size() == 27);
  CHECK(table_cells(TableId::T2).size() == 27);
  CHECK(table_cells(TableId::T3).size() == 4);
  const auto t4 = table_cells(TableId::T4);
  REQUIRE(t4.size() == 4);
  for (std::size_t i = 1; i < t4.size(); ++i)
    CHECK(t4[i].sigma > t4[i - 1].sigma);
  for (const auto& c : table_cells(TableId::T4Alt)) {
    CHECK(c.delta == 0.1);
    CHECK(std::isnan(c.ref_mean));
  }
  CHECK(table_params(TableId::T3).A == 1.0);
  CHECK(table_params(TableId::T2).Q == 0.0);
}

TEST_CASE("table cell seeds are distinct and depend on the base seed")
{
  std::set<std::uint64_t> seeds;
  for (auto id : { TableId::T1, TableId::T2 })
    for (const auto& c : table_cells(id))
      seeds.insert(table_cell_spec(id, c, 7).base_seed);
  CHECK(seeds.size() == 54);
  const auto c = table_cells(TableId::T1).front();
  CHECK(table_cell_spec(TableId::T1, c, 7).base_seed != table_cell_spec(TableId::T1, c, 8).base_seed);
  const auto s4 = table_cell_spec(TableId::T4, table_cells(TableId::T4)[3], 7);
  CHECK(s4.estimator_kind == EstimatorKind::GaussianNoise);
  CHECK(s4.config.sigma == 1.0);
}

TEST_CASE("spec validation reports every problem")
{
  auto spec = small_spec();
  spec.replications = 0;
  spec.grid_ratio = 1.0;
  try {
    spec.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("replications") != std::string::npos);
    CHECK(msg.find("grid_ratio") != std::string::npos);
  }
  spec = small_spec();
  spec.estimator_kind = EstimatorKind::GaussianNoise;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = small_spec();
  spec.config.epsilon = 0.5;
  CHECK_THROWS_AS(run_monte_carlo(spec), ValidationError);
}

TEST_CASE("single replication has zero spread")
{
  auto spec = small_spec(300, 1);
  const auto r = run_monte_carlo(spec);
  CHECK(r.replications == 1);
  CHECK(r.std_rel_l2 == 0.0);
  CHECK(r.std_m_hat == 0.0);
  CHECK(r.mean_rel_l2 > 0.0);
  CHECK(r.metadata.count("alpha") == 1);
}

TEST_CASE("Monte Carlo results do not depend on the thread count")
{
  auto spec = small_spec(400, 8);
  const auto a = run_monte_carlo(spec, 1);
  const auto b = run_monte_carlo(spec, 4);
  CHECK(a.rel_l2 == b.rel_l2);
  CHECK(a.m_hat == b.m_hat);
  CHECK(a.mean_rel_l2 == b.mean_rel_l2);
  spec.base_seed = 100;
  CHECK(run_monte_carlo(spec, 1).rel_l2 != a.rel_l2);
}

TEST_CASE("benchmark reuse gives identical reports")
{
  auto first = small_spec(300, 4);
  auto second = small_spec(600, 4);
  const ExperimentContext base(first);
  CHECK(base.shares_benchmark(second));
  const ExperimentContext reused(second, base);
  const ExperimentContext fresh(second);
  CHECK(reused.benchmark() == fresh.benchmark());
  CHECK(run_monte_carlo(reused, second).rel_l2 == run_monte_carlo(fresh, second).rel_l2);
  auto other = second;
  other.config.delta = 0.25;
  CHECK_FALSE(base.shares_benchmark(other));
}

TEST_CASE("fixed and oracle cutoff modes")
{
  auto spec = small_spec(300, 3);
  spec.cutoff = { CutoffMode::Fixed, kDefaultKappa, 3.0 };
  for (double m : run_monte_carlo(spec).m_hat)
    CHECK(m == 3.0);
  spec.cutoff = { CutoffMode::Fixed, kDefaultKappa, 1.0 };
  CHECK_THROWS_AS(run_monte_carlo(spec), ValidationError);
  spec.cutoff = { CutoffMode::Oracle, kDefaultKappa, 0.0 };
  for (double m : run_monte_carlo(spec).m_hat)
    CHECK(m == doctest::Approx(oracle_cutoff(spec.config)));
}

TEST_CASE("risk decreases with the sample size")
{
  auto small = small_spec(250, 10);
  auto large = small_spec(8000, 10);
  for (auto* s : { &small, &large })
    s->cutoff = { CutoffMode::Oracle, kDefaultKappa, 0.0 };
  CHECK(run_monte_carlo(large).mean_rel_l2 < run_monte_carlo(small).mean_rel_l2);
}

TEST_CASE("risk profile covers the cutoff grid")
{
  auto spec = small_spec(500, 4);
  spec.record_profile = true;
  const ExperimentContext ctx(spec);
  const auto r = run_monte_carlo(ctx, spec);
  REQUIRE(r.profile_m.size() == ctx.cutoff_grid().m_values.size());
  CHECK(r.profile_mean_risk.size() == r.profile_m.size());
  double best = r.profile_mean_risk.front();
  for (double v : r.profile_mean_risk) {
    CHECK(v >= 0.0);
    best = std::min(best, v);
  }
  CHECK(r.mean_profile_risk_at_m_hat >= best);
}

TEST_CASE("estimate_sample follows the cutoff rule")
{
  auto spec = small_spec(500, 1);
  const auto s = sample_stable_increments(spec.config, 5);
  const auto adaptive = estimate_sample(s.values, spec);
  REQUIRE(adaptive.selection.has_value());
  CHECK(adaptive.estimate.m == adaptive.selection->m_hat);
  spec.cutoff = { CutoffMode::Fixed, kDefaultKappa, 2.5 };
  const auto fixed = estimate_sample(s.values, spec);
  CHECK_FALSE(fixed.selection.has_value());
  CHECK(fixed.estimate.m == 2.5);
}

TEST_CASE("table CSV layout")
{
  RiskReport report;
  report.mean_rel_l2 = 0.02;
  report.std_rel_l2 = 0.01;
  const auto cell = table_cells(TableId::T3).front();
  const std::vector<TableRow> rows{ { cell, report, std::abs(0.02 - cell.ref_mean) / (cell.ref_std / 10.0) } };
  std::ostringstream out;
  write_table_csv(rows, out);
  CHECK(first_line(out.str()) ==
        "alpha,delta,n,sigma,mean_rel_l2,std_rel_l2,mean_m_hat,std_m_hat,ref_mean,ref_std,z_score");
  CHECK(out.str().find("0.0278") != std::string::npos);
}

TEST_CASE("rate study rows and slope")
{
  RateStudySpec spec;
  spec.config.params = { 1, 1, 0, 0, 1 };
  spec.config.delta = 1.0;
  spec.n_values = { 300, 1200 };
  spec.kinds = { EstimatorKind::KnownNoise, EstimatorKind::Direct };
  spec.replications = 4;
  spec.base_seed = 3;
  const auto rows = rate_study(spec);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    const double lambda = big_jump_intensity(spec.config.params, 1.0);
    CHECK(r.rate == doctest::Approx(std::log(static_cast<double>(r.n)) * std::exp(4.0 * lambda) / r.n));
    CHECK(r.m == doctest::Approx(oracle_cutoff([&] {
            auto c = spec.config;
            c.n = r.n;
            return c;
          }())));
  }
  std::ostringstream out;
  write_rate_csv(rows, out);
  CHECK(first_line(out.str()) == "alpha,delta,n,estimator,m,mean_rel_l2,std_rel_l2,rate");

  std::vector<RateRow> synthetic;
  for (std::size_t n : { 100, 1000, 10000 })
    synthetic.push_back({ 1.0, 1.0, n, EstimatorKind::KnownNoise, 1.0, 3.0 / static_cast<double>(n), 0.0, 0.0 });
  CHECK(log_log_slope(synthetic) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("plot data columns")
{
  auto spec = small_spec(300, 3);
  spec.x_points = 32;
  std::ostringstream out;
  write_plot_data(spec, 2, out);
  CHECK(first_line(out.str()) == "x,benchmark,estimate_rep1,estimate_rep2");
  std::istringstream in(out.str());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (line.rfind('#', 0) != 0)
      ++rows;
  CHECK(rows == 33);
}
