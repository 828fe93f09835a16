#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smalljump/estimators.hpp"
#include "smalljump/sampling.hpp"
#include "smalljump/selection.hpp"

namespace smalljump {

enum class CutoffMode
{
  Adaptive,
  Fixed,
  Oracle
};

std::string_view to_string(CutoffMode mode);
/// Accepts adaptive, fixed, oracle.
CutoffMode parse_cutoff_mode(std::string_view name);

struct CutoffSpec
{
  CutoffMode mode = CutoffMode::Adaptive;
  double kappa = kDefaultKappa; ///< Adaptive
  double m = 0.0;               ///< Fixed
};

struct ExperimentSpec
{
  ProcessConfig config;
  EstimatorKind estimator_kind = EstimatorKind::KnownNoise;
  std::size_t replications = 100;
  std::uint64_t base_seed = 0;
  CutoffSpec cutoff;
  double benchmark_ell = 0.0; ///< 0 selects default_benchmark_ell
  TruncationOptions truncation;
  std::size_t x_points = 2048;
  double x_half_width = 15.0; ///< grid is [-w s, w s], see default_x_grid
  double grid_ratio = 1.01;
  /// Also record, per replication, the relative risk at every grid cutoff
  /// (computed in the frequency domain).
  bool record_profile = false;

  void validate() const;
};

struct RiskReport
{
  double mean_rel_l2 = 0.0;
  double std_rel_l2 = 0.0;
  double mean_m_hat = 0.0;
  double std_m_hat = 0.0;
  std::size_t replications = 0; ///< successful ones
  std::size_t failures = 0;
  std::vector<double> rel_l2;   ///< per replication, NaN on failure
  std::vector<double> m_hat;
  std::vector<std::string> errors;
  /// record_profile only: grid cutoffs, mean risk at each of them over the
  /// replications, and the mean frequency-domain risk at m̂.
  std::vector<double> profile_m;
  std::vector<double> profile_mean_risk;
  double mean_profile_risk_at_m_hat = 0.0;
  std::map<std::string, std::string> metadata;
};

/// Estimate from one sample with the cutoff rule of `spec` (spec.config.n is
/// replaced by the sample size). `selection` is set in adaptive mode.
struct SampleEstimate
{
  SpectralEstimate estimate;
  std::optional<Selection> selection;
};
SampleEstimate estimate_sample(std::span<const double> sample, const ExperimentSpec& spec,
                               unsigned threads = 1);

/// Benchmark, noise table and selection quantities shared by all
/// replications of one configuration. Immutable once built.
class ExperimentContext
{
public:
  explicit ExperimentContext(const ExperimentSpec& spec, unsigned threads = 1);
  /// Reuses the benchmark spectrum of `other` when the benchmark inputs
  /// (params, ε, Δ, ℓ, x grid) agree.
  ExperimentContext(const ExperimentSpec& spec, const ExperimentContext& other, unsigned threads = 1);

  const UniformGrid& x_grid() const { return grid_; }
  double step() const { return step_; }
  double ell() const { return ell_; }
  const std::vector<double>& benchmark() const { return benchmark_values_; }
  const std::vector<Complex>& benchmark_spectrum() const { return *benchmark_spectrum_; }
  const CutoffGrid& cutoff_grid() const { return cutoff_grid_; }
  double fixed_cutoff() const { return fixed_m_; }
  /// True when spec resolves to the same benchmark configuration and x grid.
  bool shares_benchmark(const ExperimentSpec& spec) const;

  struct Replication
  {
    double rel_l2;
    double m_hat;
    std::vector<double> profile; ///< empty unless record_profile
    double profile_at_m_hat = 0.0;
    std::vector<double> estimate; ///< only when requested
  };

  Replication replicate(std::size_t r, bool keep_estimate = false) const;

private:
  void build(unsigned threads, const ExperimentContext* other);

  ExperimentSpec spec_;
  UniformGrid grid_;
  double step_ = 0.0;
  double ell_ = 0.0;
  double fixed_m_ = 0.0;
  double lambda_delta_ = 0.0;
  std::size_t mesh_count_ = 0;
  CutoffGrid cutoff_grid_;
  std::vector<double> penalties_;
  std::vector<Complex> noise_;
  std::shared_ptr<const std::vector<Complex>> benchmark_spectrum_;
  std::vector<double> benchmark_values_;
  double benchmark_norm_ = 0.0; ///< (1/π) ∫_0^ℓ |φ_Z|²
  std::shared_ptr<const UniformEcfPlan> plan_;
};

/// Monte Carlo over `spec.replications` replications; replication r uses
/// seed derive_seed(base_seed, r). Results do not depend on `threads`.
/// Throws NumericError when more than 5% of the replications fail.
RiskReport run_monte_carlo(const ExperimentSpec& spec, unsigned threads = 1);
RiskReport run_monte_carlo(const ExperimentContext& context, const ExperimentSpec& spec,
                           unsigned threads = 1);

enum class TableId
{
  T1,
  T2,
  T3,
  T4,
  T4Alt
};

std::string_view to_string(TableId id);
/// Accepts T1, T2, T3, T4, T4-alt (case-insensitive).
TableId parse_table_id(std::string_view name);

struct TableCell
{
  double alpha;
  double delta;
  std::size_t n;
  double sigma;
  double ref_mean;  ///< NaN when no reference value exists
  double ref_std;
  double ref_m_hat;
  double ref_m_hat_std;
};

struct TableRow
{
  TableCell cell;
  RiskReport report;
  double z_score; ///< |mean - ref_mean| / (ref_std / √100)
  double seconds = 0.0; ///< wall time of the cell, benchmark included
};

/// The (α, Δ, n, σ) lattice of a table with the reported values.
std::vector<TableCell> table_cells(TableId id);
/// Lévy parameters of a table.
TemperedStableParams table_params(TableId id);
/// Full spec of one table cell; the seed depends on base_seed and the cell.
ExperimentSpec table_cell_spec(TableId id, const TableCell& cell, std::uint64_t base_seed);

/// Runs every cell (or those accepted by `filter`) in table order.
std::vector<TableRow> reproduce_table(TableId id, std::uint64_t base_seed, unsigned threads = 1,
                                      const std::function<bool(const TableCell&)>& filter = {},
                                      bool record_profile = false);

/// alpha,delta,n,sigma,mean_rel_l2,std_rel_l2,mean_m_hat,std_m_hat,ref_mean,ref_std,z_score
void write_table_csv(const std::vector<TableRow>& rows, std::ostream& out);

struct RateStudySpec
{
  ProcessConfig config; ///< n is overridden by n_values
  std::vector<std::size_t> n_values{ 500, 2000, 8000, 32000 };
  std::vector<EstimatorKind> kinds{ EstimatorKind::KnownNoise };
  std::size_t replications = 100;
  std::uint64_t base_seed = 0;
};

struct RateRow
{
  double alpha;
  double delta;
  std::size_t n;
  EstimatorKind kind;
  double m;
  double mean_rel_l2;
  double std_rel_l2;
  double rate; ///< (log n / Δ)^(1/α) e^{4λΔ} / n
};

/// Oracle-cutoff risk against n for each estimator kind.
std::vector<RateRow> rate_study(const RateStudySpec& spec, unsigned threads = 1);
void write_rate_csv(const std::vector<RateRow>& rows, std::ostream& out);
/// Least-squares slope of log(mean_rel_l2) against log(n) over `rows`.
double log_log_slope(const std::vector<RateRow>& rows);

/// x, benchmark, estimate_rep1..repK for the first K replications.
void write_plot_data(const ExperimentSpec& spec, std::size_t K, std::ostream& out, unsigned threads = 1);

} // namespace smalljump
