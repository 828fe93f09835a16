#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smalljump/csv_io.hpp"
#include "smalljump/error.hpp"
#include "smalljump/estimators.hpp"
#include "smalljump/experiments.hpp"
#include "smalljump/parallel.hpp"
#include "smalljump/sampling.hpp"
#include "smalljump/selection.hpp"

using namespace smalljump;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ProcessOptions
{
  ProcessConfig config;
  double trunc_eta = kDefaultTruncEta;
  bool variance_matching = true;
};

struct EstimatorOptions
{
  std::string kind = "known-noise";
  std::string cutoff = "adaptive";
  double m = 0.0;
  double kappa = kDefaultKappa;
  bool theoretical_kappa = false;
  double grid_ratio = 1.01;
  std::size_t x_points = 2048;
  double x_half_width = 15.0;
  double benchmark_ell = 0.0;
};

struct Common
{
  std::string config_path;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c)
{
  cmd->add_option("--config", c.config_path,
                  "JSON file whose keys are option names in snake_case; flags override it");
  cmd->add_option("--threads", c.threads, "worker threads (0: LEVY_THREADS, else hardware)");
}

void add_process(CLI::App* cmd, ProcessOptions& p, bool with_n = true)
{
  auto& c = p.config;
  cmd->add_option("--P", c.params.P, "Lévy density weight on x > 0");
  cmd->add_option("--Q", c.params.Q, "Lévy density weight on x < 0");
  cmd->add_option("--A", c.params.A, "tempering on x > 0");
  cmd->add_option("--B", c.params.B, "tempering on x < 0");
  cmd->add_option("--alpha", c.params.alpha, "index in (0, 2)");
  cmd->add_option("--epsilon", c.epsilon, "small/large jump threshold in (0, 1]");
  cmd->add_option("--delta", c.delta, "sampling interval");
  cmd->add_option("--sigma", c.sigma, "Brownian volatility");
  if (with_n)
    cmd->add_option("--n", c.n, "number of increments");
  cmd->add_option("--trunc-eta,--trunc_eta", p.trunc_eta, "compound Poisson truncation (tempered)");
  cmd->add_option("--variance-matching,--variance_matching", p.variance_matching,
                  "Gaussian replacement of the truncated jumps");
}

void add_estimator(CLI::App* cmd, EstimatorOptions& e)
{
  cmd->add_option("--kind", e.kind, "known-noise | direct | gaussian-noise");
  cmd->add_option("--cutoff", e.cutoff, "adaptive | fixed | oracle");
  cmd->add_option("--m", e.m, "cutoff for --cutoff fixed");
  cmd->add_option("--kappa", e.kappa, "penalty constant");
  cmd->add_flag("--theoretical-kappa,--theoretical_kappa", e.theoretical_kappa,
                "use kappa = 32/(3 pi) + 1e-6");
  cmd->add_option("--grid-ratio,--grid_ratio", e.grid_ratio, "ratio of the geometric cutoff grid");
  cmd->add_option("--x-points,--x_points", e.x_points, "points of the x grid");
  cmd->add_option("--x-half-width,--x_half_width", e.x_half_width, "x grid is [-w s, w s]");
  cmd->add_option("--benchmark-ell,--benchmark_ell", e.benchmark_ell, "benchmark cutoff (0: default)");
}

std::string option_key(const CLI::Option* opt)
{
  for (const auto& name : opt->get_lnames())
    if (name.find('-') == std::string::npos)
      return name;
  std::string name = opt->get_lnames().front();
  for (char& ch : name)
    if (ch == '-')
      ch = '_';
  return name;
}

// Fills every option not given on the command line from the JSON file.
void apply_config_file(CLI::App* cmd, const std::string& path)
{
  if (path.empty())
    return;
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object())
    throw ValidationError("config file " + path + " must hold a JSON object");
  std::map<std::string, CLI::Option*> by_key;
  for (auto* opt : cmd->get_options())
    if (!opt->get_lnames().empty())
      by_key[option_key(opt)] = opt;
  std::string errors;
  for (const auto& [key, value] : doc.items()) {
    auto it = by_key.find(key);
    if (it == by_key.end() || key == "config" || key == "help") {
      errors += " unknown key '" + key + "';";
      continue;
    }
    CLI::Option* opt = it->second;
    if (opt->count() > 0)
      continue;
    std::vector<std::string> items;
    auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_array())
      for (const auto& v : value)
        items.push_back(text(v));
    else
      items.push_back(text(value));
    try {
      opt->clear();
      for (const auto& s : items)
        opt->add_result(s);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      errors += " key '" + key + "': " + e.what() + ";";
    }
  }
  if (!errors.empty())
    throw ValidationError("config file " + path + ":" + errors);
}

json options_json(CLI::App* cmd)
{
  json out = json::object();
  for (auto* opt : cmd->get_options()) {
    if (opt->get_lnames().empty())
      continue;
    const auto key = option_key(opt);
    if (key == "help")
      continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      out[key] = r.size() == 1 ? json(r.front()) : json(r);
    } else {
      out[key] = opt->get_default_str();
    }
  }
  return out;
}

json config_json(const ProcessConfig& c)
{
  return { { "P", c.params.P },         { "Q", c.params.Q },         { "A", c.params.A },
           { "B", c.params.B },         { "alpha", c.params.alpha }, { "epsilon", c.epsilon },
           { "delta", c.delta },        { "sigma", c.sigma },        { "n", c.n } };
}

void write_sidecar(const std::string& out_path, const std::string& command, CLI::App* cmd,
                   json extra = json::object())
{
  json doc;
  doc["program"] = "smalljump";
  doc["version"] = kVersion;
  doc["command"] = command;
  doc["output"] = out_path;
  doc["options"] = options_json(cmd);
  for (auto& [k, v] : extra.items())
    doc[k] = v;
  std::ofstream f(out_path + ".meta.json", std::ios::binary);
  f << doc.dump(2) << '\n';
  if (!f)
    throw ValidationError("failed writing " + out_path + ".meta.json");
}

ExperimentSpec experiment_spec(const ProcessOptions& p, const EstimatorOptions& e, std::uint64_t seed)
{
  ExperimentSpec spec;
  spec.config = p.config;
  spec.truncation = { p.trunc_eta, p.variance_matching };
  spec.base_seed = seed;
  spec.estimator_kind = parse_estimator_kind(e.kind);
  spec.cutoff.mode = parse_cutoff_mode(e.cutoff);
  spec.cutoff.kappa = e.theoretical_kappa ? kTheoreticalKappa : e.kappa;
  spec.cutoff.m = e.m;
  spec.grid_ratio = e.grid_ratio;
  spec.x_points = e.x_points;
  spec.x_half_width = e.x_half_width;
  spec.benchmark_ell = e.benchmark_ell;
  return spec;
}

// Collects every problem with the estimator options before running anything.
void validate_estimator(const ExperimentSpec& spec, const EstimatorOptions& e)
{
  std::string msg;
  try {
    spec.config.validate();
  } catch (const ValidationError& err) {
    msg += err.what();
  }
  if (spec.estimator_kind == EstimatorKind::GaussianNoise && !(spec.config.sigma > 0.0))
    msg += " --kind gaussian-noise needs sigma > 0; with sigma = 0 use --kind known-noise;";
  if (spec.estimator_kind == EstimatorKind::Benchmark)
    msg += " --kind must be known-noise, direct or gaussian-noise;";
  if (spec.cutoff.mode == CutoffMode::Fixed && !(e.m > 0.0))
    msg += " --cutoff fixed needs --m > 0;";
  if (!(spec.cutoff.kappa > 0.0))
    msg += " --kappa must be > 0;";
  if (!(spec.grid_ratio > 1.0))
    msg += " --grid-ratio must be > 1;";
  if (spec.x_points < 16)
    msg += " --x-points must be >= 16;";
  if (!(spec.x_half_width > 0.0))
    msg += " --x-half-width must be > 0;";
  if (!msg.empty())
    throw ValidationError(msg.substr(msg.find_first_not_of(' ')));
}

std::string default_out(const std::string& out, const std::string& fallback)
{
  return out.empty() ? fallback : out;
}

std::string with_suffix(const std::string& path, const std::string& suffix)
{
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix;
}

void warn_kappa(double kappa)
{
  if (kappa < kTheoreticalKappa)
    std::cerr << "note: kappa = " << kappa << " is below the theoretical floor 32/(3 pi) = "
              << kTheoreticalKappa << "\n";
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Spectral estimation of the small-jump density of Lévy processes" };
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Common common;

  // sample
  ProcessOptions sp;
  std::uint64_t s_seed = 42;
  std::string s_out;
  auto* sample_cmd = app.add_subcommand("sample", "draw n increments and write them as CSV");
  add_common(sample_cmd, common);
  add_process(sample_cmd, sp);
  sample_cmd->add_option("--seed", s_seed, "random seed");
  sample_cmd->add_option("--out", s_out, "output CSV (default sample.csv)");

  // estimate / select
  ProcessOptions ep;
  EstimatorOptions ee;
  std::uint64_t e_seed = 42;
  std::string e_input, e_out, e_trace, e_plot;
  std::size_t e_plot_reps = 50;
  auto* estimate_cmd = app.add_subcommand("estimate", "estimate g_Δ from a sample file or a fresh sample");
  add_common(estimate_cmd, common);
  add_process(estimate_cmd, ep);
  add_estimator(estimate_cmd, ee);
  estimate_cmd->add_option("--input", e_input, "sample CSV written by `sample` (else draw with --seed)");
  estimate_cmd->add_option("--seed", e_seed, "random seed when no --input");
  estimate_cmd->add_option("--out", e_out, "estimate CSV (default estimate.csv)");
  estimate_cmd->add_option("--trace", e_trace, "selection trace CSV (default <out>.trace.csv)");
  estimate_cmd->add_option("--plot-data,--plot_data", e_plot,
                           "also write x, benchmark, estimate_rep1..K over fresh replications");
  estimate_cmd->add_option("--plot-reps,--plot_reps", e_plot_reps, "K for --plot-data");

  ProcessOptions lp;
  EstimatorOptions le;
  std::uint64_t l_seed = 42;
  std::string l_input, l_out;
  auto* select_cmd = app.add_subcommand("select", "penalized cutoff selection; writes the trace");
  add_common(select_cmd, common);
  add_process(select_cmd, lp);
  add_estimator(select_cmd, le);
  select_cmd->add_option("--input", l_input, "sample CSV (else draw with --seed)");
  select_cmd->add_option("--seed", l_seed, "random seed when no --input");
  select_cmd->add_option("--out", l_out, "trace CSV (default trace.csv)");

  // bounds
  ProcessOptions bp;
  double b_m = 0.0;
  std::string b_out;
  auto* bounds_cmd = app.add_subcommand("bounds", "theoretical bias/variance bounds and m*");
  add_common(bounds_cmd, common);
  add_process(bounds_cmd, bp);
  bounds_cmd->add_option("--m", b_m, "cutoff at which to evaluate the bounds (0: m*, else pi/(2 epsilon))");
  bounds_cmd->add_option("--out", b_out, "optional CSV");

  // table
  std::string t_id;
  std::uint64_t t_seed = 7;
  std::string t_out;
  std::vector<double> t_alpha, t_delta, t_sigma;
  std::vector<std::size_t> t_n;
  auto* table_cmd = app.add_subcommand("table", "reproduce one of the tables T1, T2, T3, T4, T4-alt");
  add_common(table_cmd, common);
  table_cmd->add_option("table_id", t_id, "T1 | T2 | T3 | T4 | T4-alt")->required();
  table_cmd->add_option("--seed", t_seed, "base seed");
  table_cmd->add_option("--out", t_out, "output CSV (default <table_id>.csv)");
  table_cmd->add_option("--alpha", t_alpha, "only cells with these alpha values");
  table_cmd->add_option("--delta", t_delta, "only cells with these delta values");
  table_cmd->add_option("--n", t_n, "only cells with these sample sizes");
  table_cmd->add_option("--sigma", t_sigma, "only cells with these sigma values");

  // rate-study
  ProcessOptions rp;
  rp.config.params = { 1.0, 1.0, 0.0, 0.0, 1.0 };
  std::vector<std::size_t> r_n{ 500, 2000, 8000, 32000 };
  std::vector<std::string> r_kinds{ "known-noise" };
  std::size_t r_reps = 100;
  std::uint64_t r_seed = 11;
  std::string r_out;
  auto* rate_cmd = app.add_subcommand("rate-study", "risk vs n at the oracle cutoff");
  add_common(rate_cmd, common);
  add_process(rate_cmd, rp, false);
  rate_cmd->add_option("--n-values,--n_values", r_n, "sample sizes");
  rate_cmd->add_option("--kinds", r_kinds, "estimators to compare");
  rate_cmd->add_option("--replications", r_reps, "replications per point");
  rate_cmd->add_option("--seed", r_seed, "base seed");
  rate_cmd->add_option("--out", r_out, "output CSV (default rate_study.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    apply_config_file(cmd, common.config_path);
    const unsigned threads = resolve_threads(common.threads);

    if (cmd == sample_cmd) {
      sp.config.validate();
      const auto out = default_out(s_out, "sample.csv");
      const auto sample = sample_full_increments(sp.config, s_seed, { sp.trunc_eta, sp.variance_matching });
      write_sample_csv(sample, out);
      write_sidecar(out, "sample", cmd, { { "config", config_json(sp.config) }, { "generator", sample.generator } });
      std::cout << "wrote " << sample.values.size() << " increments to " << out << "\n";
    } else if (cmd == estimate_cmd || cmd == select_cmd) {
      const bool is_select = cmd == select_cmd;
      auto& p = is_select ? lp : ep;
      auto& e = is_select ? le : ee;
      const auto& input = is_select ? l_input : e_input;
      const std::uint64_t seed = is_select ? l_seed : e_seed;
      if (is_select && e.cutoff != "adaptive")
        throw ValidationError("select runs the adaptive rule; --cutoff must be adaptive");
      IncrementSample sample;
      if (!input.empty()) {
        sample = read_sample_csv(input);
        p.config = sample.config;
        p.config.n = sample.values.size();
      }
      auto spec = experiment_spec(p, e, seed);
      validate_estimator(spec, e);
      warn_kappa(spec.cutoff.kappa);
      if (input.empty())
        sample = sample_full_increments(spec.config, seed, spec.truncation);
      const auto result = estimate_sample(sample.values, spec, threads);
      json extra{ { "config", config_json(spec.config) }, { "input", input }, { "seed", sample.seed } };
      if (result.selection)
        extra["m_hat"] = result.selection->m_hat;
      if (is_select) {
        const auto out = default_out(l_out, "trace.csv");
        write_trace_csv(*result.selection, out);
        write_sidecar(out, "select", cmd, extra);
        std::cout << "m_hat = " << format_double(result.selection->m_hat) << "\n";
      } else {
        const auto out = default_out(e_out, "estimate.csv");
        std::map<std::string, std::string> md{ { "seed", std::to_string(sample.seed) },
                                               { "cutoff_mode", e.cutoff },
                                               { "kappa", format_double(spec.cutoff.kappa) } };
        const double ell = spec.benchmark_ell > 0.0 ? spec.benchmark_ell : default_benchmark_ell(spec.config);
        const auto bench = benchmark_density(spec.config, ell, result.estimate.grid, threads);
        const double risk = relative_l2_error(result.estimate, bench);
        md["benchmark_ell"] = format_double(ell);
        md["rel_l2"] = format_double(risk);
        extra["benchmark_ell"] = ell;
        extra["rel_l2"] = risk;
        write_estimate_csv(result.estimate, out, md);
        write_sidecar(out, "estimate", cmd, extra);
        std::cout << (result.selection ? "m_hat = " : "m = ") << format_double(result.estimate.m) << "\n";
        std::cout << "relative L2 risk = " << format_double(risk) << " (benchmark ell = " << format_double(ell)
                  << ")\n";
        if (result.selection) {
          const auto trace = default_out(e_trace, with_suffix(out, ".trace.csv"));
          write_trace_csv(*result.selection, trace);
          std::cout << "trace written to " << trace << "\n";
        }
        if (!e_plot.empty()) {
          auto plot_spec = spec;
          plot_spec.replications = e_plot_reps;
          auto f = open_output(e_plot);
          write_plot_data(plot_spec, e_plot_reps, f, threads);
          if (!f)
            throw ValidationError("failed writing " + e_plot);
          write_sidecar(e_plot, "estimate --plot-data", cmd, extra);
        }
      }
    } else if (cmd == bounds_cmd) {
      bp.config.validate();
      const auto probe = theoretical_bounds(bp.config, std::max(b_m, 1.0), bp.config.n);
      double m = b_m;
      if (!(m > 0.0))
        m = probe.m_star ? *probe.m_star : 3.14159265358979323846 / (2.0 * bp.config.epsilon);
      const auto r = theoretical_bounds(bp.config, m, bp.config.n);
      std::ostringstream text;
      if (r.m_star)
        text << "m* = " << format_double(*r.m_star) << "\n";
      else
        text << "m* undefined: " << r.m_star_note << "\n";
      text << "m = " << format_double(m) << "\n"
           << "bias_bound = " << format_double(r.bias_bound) << "\n"
           << "variance_bound = " << format_double(r.variance_bound) << "\n"
           << "lambda = " << format_double(r.lambda) << "\nM = " << format_double(r.M) << "\n";
      if (r.m_star && !r.m_star_note.empty())
        text << "note: " << r.m_star_note << "\n";
      std::cout << text.str();
      if (!b_out.empty()) {
        auto f = open_output(b_out);
        f << "m,m_star,bias_bound,variance_bound,lambda,M\n"
          << format_double(m) << ',' << (r.m_star ? format_double(*r.m_star) : "nan") << ','
          << format_double(r.bias_bound) << ',' << format_double(r.variance_bound) << ','
          << format_double(r.lambda) << ',' << format_double(r.M) << '\n';
        if (!f)
          throw ValidationError("failed writing " + b_out);
        write_sidecar(b_out, "bounds", cmd, { { "config", config_json(bp.config) } });
      }
    } else if (cmd == table_cmd) {
      const auto id = parse_table_id(t_id);
      const auto out = default_out(t_out, std::string(to_string(id)) + ".csv");
      auto pick = [](const auto& allowed, auto v) {
        if (allowed.empty())
          return true;
        for (auto a : allowed)
          if (a == v)
            return true;
        return false;
      };
      const auto rows = reproduce_table(
        id, t_seed, threads,
        [&](const TableCell& c) {
          return pick(t_alpha, c.alpha) && pick(t_delta, c.delta) && pick(t_n, c.n) && pick(t_sigma, c.sigma);
        },
        false);
      if (rows.empty())
        throw ValidationError("no table cell matches the filters");
      std::ostringstream csv;
      write_table_csv(rows, csv);
      auto f = open_output(out);
      f << csv.str();
      if (!f)
        throw ValidationError("failed writing " + out);
      json cells = json::array();
      for (const auto& r : rows) {
        json md = json::object();
        for (const auto& [k, v] : r.report.metadata)
          md[k] = v;
        cells.push_back(md);
      }
      write_sidecar(out, "table", cmd, { { "table", std::string(to_string(id)) }, { "cells", cells } });
      std::cout << csv.str();
    } else if (cmd == rate_cmd) {
      RateStudySpec rs;
      rs.config = rp.config;
      rs.config.validate();
      rs.n_values = r_n;
      rs.kinds.clear();
      for (const auto& k : r_kinds) {
        const auto kind = parse_estimator_kind(k);
        if (kind == EstimatorKind::GaussianNoise && !(rs.config.sigma > 0.0))
          throw ValidationError("gaussian-noise needs sigma > 0; with sigma = 0 use known-noise");
        rs.kinds.push_back(kind);
      }
      rs.replications = r_reps;
      rs.base_seed = r_seed;
      const auto rows = rate_study(rs, threads);
      const auto out = default_out(r_out, "rate_study.csv");
      auto f = open_output(out);
      write_rate_csv(rows, f);
      if (!f)
        throw ValidationError("failed writing " + out);
      json slopes = json::object();
      for (const auto kind : rs.kinds) {
        std::vector<RateRow> sub;
        for (const auto& r : rows)
          if (r.kind == kind)
            sub.push_back(r);
        if (sub.size() >= 2) {
          const double s = log_log_slope(sub);
          slopes[std::string(to_string(kind))] = s;
          std::cout << to_string(kind) << ": log-log slope " << format_double(s) << "\n";
        }
      }
      write_sidecar(out, "rate-study", cmd, { { "config", config_json(rs.config) }, { "slopes", slopes } });
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
