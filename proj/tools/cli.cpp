// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "tomostat/error.hpp"
#include "tomostat/format.hpp"
#include "tomostat/parallel.hpp"

namespace tomostat::cli {

namespace {

constexpr double kReferenceN = 100000.0;

Error bad_key(const std::string& key, const std::string& what) {
  return Error(ErrorKind::invalid_config, key + ": " + what);
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::io_error, "cannot open " + path + " for writing");
  return f;
}

// Everything needed to evaluate the filtered quasiprobability on lossy data:
// measured state, loss-compensated operator kernel and its Fock coefficients.
struct Setup {
  GaussianState measured;
  double scale = 1.0;  // sqrt(eta): displacement seen by the compensated operator
  OperatorSpec op;     // at alpha = 0
  TheoryEngine engine;
  std::vector<double> fock;

  static Setup make(const RunConfig& cfg) {
    const NonclassicalityFilter filter(cfg.width);
    OperatorSpec op = operator_cf(filter, {0.0, 0.0});
    const double scale = std::sqrt(cfg.eta);
    if (cfg.eta != 1.0) op = op.loss_compensated(scale);
    TheoryEngine engine(op.kernel);
    auto fock = engine.fock(cfg.n_max);
    return {cfg.state().with_loss(cfg.eta), scale, op, std::move(engine), std::move(fock)};
  }

  VarianceReport report(Complex alpha, std::size_t n) const {
    VarianceReport row = variance_report(engine, fock, measured, scale * alpha, n);
    row.alpha = alpha;
    return row;
  }

  std::vector<VarianceReport> scan(const std::vector<Complex>& grid, std::size_t n) const {
    std::vector<VarianceReport> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { rows[i] = report(grid[i], n); });
    return rows;
  }

  OperatorSpec op_at(Complex alpha) const { return op.displaced(scale * alpha); }
};

PatternTable table_for(const QuadratureSampleSet& set, const OperatorSpec& op, double dx) {
  double reach = 1.0;
  for (const auto& r : set.records) reach = std::max(reach, std::abs(r.x));
  reach = std::ceil(reach) + 1.0;
  return PatternTable::build(op, -reach, reach, dx, 64);
}

ExperimentConfig experiment(const RunConfig& cfg) {
  ExperimentConfig e;
  e.state = cfg.state();
  e.n = static_cast<std::size_t>(cfg.n);
  e.seed = cfg.seed;
  e.eta = cfg.eta;
  if (cfg.scheme == "cascaded") {
    e.scheme = Scheme::cascaded;
    e.t = cfg.t;
    e.alpha = {cfg.mix_re, cfg.mix_im};
  }
  return e;
}

void write_estimate(std::ostream& out, const EstimateWithUncertainty& e) {
  out << "method=" << to_string(e.method) << '\n'
      << "N=" << e.n << '\n'
      << "mean=" << format_double(e.mean) << '\n'
      << "per_sample_variance=" << format_double(e.per_sample_variance) << '\n'
      << "std_error=" << format_double(e.std_error) << '\n'
      << "significance=" << format_double(e.significance()) << '\n';
}

// Section headers become key prefixes: `[state]` + `vx = 0.5` -> `state.vx`.
class SectionedConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> flat;
    for (auto& item : CLI::ConfigBase::from_config(input)) {
      if (item.name == "++" || item.name == "--") continue;
      std::string prefix;
      for (const auto& p : item.parents) prefix += p + ".";
      item.name = prefix + item.name;
      item.parents.clear();
      flat.push_back(std::move(item));
    }
    return flat;
  }
};

}  // namespace

void RunConfig::validate() const {
  if (!(vx > 0.0)) throw bad_key("state.vx", "must be positive");
  if (!(vp > 0.0)) throw bad_key("state.vp", "must be positive");
  try {
    state().validate();
  } catch (const Error& e) {
    throw bad_key("state", e.what());
  }
  if (!(width > 0.0)) throw bad_key("filter.width", "must be positive");
  if (!(grid_step > 0.0)) throw bad_key("grid.step", "must be positive");
  if (!(grid_max >= grid_min)) throw bad_key("grid.max", "must not be below grid.min");
  if (axis != "real" && axis != "imag") throw bad_key("grid.axis", "expected real or imag");
  if (n < 1) throw bad_key("run.n", "must be at least 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw bad_key("run.eta", "must lie in (0, 1]");
  if (n_max < 0 || n_max > 200) throw bad_key("run.n_max", "must lie in [0, 200]");
  if (scheme != "balanced" && scheme != "unbalanced" && scheme != "cascaded") {
    throw bad_key("run.scheme", "expected balanced, unbalanced or cascaded");
  }
  if (!(t > 0.0 && t <= 1.0)) throw bad_key("run.t", "must lie in (0, 1]");
  if (!(table_dx > 0.0)) throw bad_key("run.table_dx", "must be positive");
}

GaussianState RunConfig::state() const { return {{mean_re, mean_im}, vx, vp, cxp}; }

std::vector<Complex> RunConfig::grid() const {
  const auto count = static_cast<std::size_t>(std::floor((grid_max - grid_min) / grid_step + 1e-9)) + 1;
  // Exact decimal grid points when 1/step is an integer (0.05 -> 20).
  const double inv = std::round(1.0 / grid_step);
  const bool decimal = std::abs(inv * grid_step - 1.0) < 1e-12;
  const double first = std::round(grid_min * inv);
  std::vector<Complex> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double v = decimal && std::abs(first - grid_min * inv) < 1e-9 ? (first + k) / inv
                                                                        : grid_min + k * grid_step;
    out[k] = axis == "real" ? Complex(v, 0.0) : Complex(0.0, v);
  }
  return out;
}

double phase_uniformity_pvalue(const QuadratureSampleSet& set, int bins) {
  if (set.size() == 0 || bins < 2) return 1.0;
  std::vector<double> counts(bins, 0.0);
  for (const auto& r : set.records) {
    const int b = std::min(bins - 1, static_cast<int>(r.phi / std::numbers::pi * bins));
    counts[b] += 1.0;
  }
  const double expected = static_cast<double>(set.size()) / bins;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  return boost::math::gamma_q(0.5 * (bins - 1), 0.5 * chi2);
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.scheme == "unbalanced") {
    throw bad_key("run.scheme", "simulate writes quadrature records; use balanced or cascaded");
  }
  if (cfg.output.empty()) throw bad_key("io.output", "simulate needs an output path");
  const auto set = sample_quadratures(experiment(cfg));
  save_quadratures(cfg.output, set);
  out << "N=" << set.size() << " seed=" << set.seed
      << " phase_uniformity_p=" << fixed(phase_uniformity_pvalue(set)) << '\n';
}

void cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.input.empty()) throw bad_key("io.input", "estimate needs a quadrature file");
  const auto set = load_quadratures(cfg.input);
  const Setup setup = Setup::make(cfg);
  const auto table = table_for(set, setup.op_at(cfg.alpha()), cfg.table_dx);
  out << "alpha_re=" << format_double(cfg.alpha_re) << '\n'
      << "alpha_im=" << format_double(cfg.alpha_im) << '\n';
  write_estimate(out, empirical_estimate_bhd(set, table));
}

void cmd_theory(const RunConfig& cfg, std::ostream& out) {
  const Setup setup = Setup::make(cfg);
  const auto row = setup.report(cfg.alpha(), static_cast<std::size_t>(cfg.n));
  write_variance_header(out);
  write_variance_row(out, row);
  if (!cfg.output.empty()) {
    auto f = open_output(cfg.output);
    write_photon_distribution(
        f, photon_number_distribution(setup.measured, setup.scale * cfg.alpha(), cfg.n_max));
  }
}

void cmd_compare(const RunConfig& cfg, std::ostream& out) {
  const Setup setup = Setup::make(cfg);
  const auto rows = setup.scan(cfg.grid(), static_cast<std::size_t>(cfg.n));
  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.output.empty()) {
    file = open_output(cfg.output);
    sink = &file;
  }
  write_variance_header(*sink);
  for (const auto& row : rows) write_variance_row(*sink, row);
}

void cmd_reproduce_example(const RunConfig& cfg, std::ostream& out) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.dir, ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot create " + cfg.dir + ": " + ec.message());
  const fs::path dir(cfg.dir);
  const auto n = static_cast<std::size_t>(cfg.n);

  const Setup setup = Setup::make(cfg);
  const auto grid = cfg.grid();
  const auto rows = setup.scan(grid, n);
  const auto coord = [&](const VarianceReport& r) {
    return cfg.axis == "real" ? r.alpha.real() : r.alpha.imag();
  };

  {
    auto f = open_output((dir / "variance_report.csv").string());
    write_variance_header(f);
    for (const auto& r : rows) write_variance_row(f, r);
  }
  {
    auto f2 = open_output((dir / "fig2_quasiprobability.csv").string());
    auto f3 = open_output((dir / "fig3_sigma_balanced.csv").string());
    auto f4 = open_output((dir / "fig4_sigma_unbalanced.csv").string());
    auto f5 = open_output((dir / "fig5_comparison.csv").string());
    f2 << "alpha,P\n";
    f3 << "alpha,sigma_bhd\n";
    f4 << "alpha,sigma_unbalanced\n";
    f5 << "alpha,P,P_minus_sigma_bhd,P_plus_sigma_bhd,P_minus_sigma_unbalanced,"
          "P_plus_sigma_unbalanced\n";
    for (const auto& r : rows) {
      const std::string a = format_double(coord(r));
      f2 << a << ',' << format_double(r.P) << '\n';
      f3 << a << ',' << format_double(r.sigma_bhd) << '\n';
      f4 << a << ',' << format_double(r.sigma_unbalanced) << '\n';
      f5 << a << ',' << format_double(r.P) << ',' << format_double(r.P - r.sigma_bhd) << ','
         << format_double(r.P + r.sigma_bhd) << ',' << format_double(r.P - r.sigma_unbalanced)
         << ',' << format_double(r.P + r.sigma_unbalanced) << '\n';
    }
  }
  {
    auto f = open_output((dir / "plot.gp").string());
    f << "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'alpha'\n"
         "set terminal pngcairo size 800,600\n"
         "set output 'fig2_quasiprobability.png'\n"
         "plot 'fig2_quasiprobability.csv' using 1:2 with lines\n"
         "set output 'fig3_sigma_balanced.png'\n"
         "plot 'fig3_sigma_balanced.csv' using 1:2 with lines\n"
         "set output 'fig4_sigma_unbalanced.png'\n"
         "plot 'fig4_sigma_unbalanced.csv' using 1:2 with lines\n"
         "set output 'fig5_comparison.png'\n"
         "plot 'fig5_comparison.csv' using 1:3:4 with filledcurves fs transparent solid 0.3 "
         "title 'balanced', \\\n"
         "     '' using 1:5:6 with filledcurves fs transparent solid 0.5 title 'unbalanced', \\\n"
         "     '' using 1:2 with lines title 'P'\n";
  }

  const Complex a0 = cfg.alpha();
  const VarianceReport point = setup.report(a0, n);
  // P is even in alpha for centered states; ties go to the largest coordinate.
  auto min_row = rows.begin();
  for (auto it = rows.begin(); it != rows.end(); ++it) {
    if (it->P <= min_row->P + 1e-12 * std::abs(min_row->P)) min_row = it;
  }
  double min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) min_ratio = std::min(min_ratio, r.sigma_bhd / r.sigma_unbalanced);

  const auto samples = sample_quadratures(experiment(cfg));
  save_quadratures((dir / "samples.tsv").string(), samples);
  const auto table = table_for(samples, setup.op_at(a0), cfg.table_dx);
  const auto empirical = empirical_estimate_bhd(samples, table);
  const double theory_per_sample = point.sigma_bhd * point.sigma_bhd * n;

  // Reference values are quoted at N = 100000.
  const double to_reference = std::sqrt(n / kReferenceN);
  const double sig_b = std::abs(point.P) / point.sigma_bhd;
  const double sig_u = std::abs(point.P) / point.sigma_unbalanced;
  struct Check {
    std::string name;
    double value;
    double target;
    double tol;
    bool relative;
  };
  const std::vector<Check> checks = {
      {"P(alpha)", point.P, -0.31, 0.02, false},
      {"argmin_P", coord(*min_row), 0.6, 0.05, false},
      {"sigma_bhd@N=100000", point.sigma_bhd * to_reference, 0.191, 0.10, true},
      {"sigma_unbalanced@N=100000", point.sigma_unbalanced * to_reference, 0.010, 0.10, true},
      {"significance_balanced@N=100000", sig_b / to_reference, 1.6, 0.15, true},
      {"significance_unbalanced@N=100000", sig_u / to_reference, 31.0, 0.15, true},
      {"monte_carlo_per_sample_variance", empirical.per_sample_variance, theory_per_sample, 0.05,
       true},
      {"empirical_mean_within_3_std_error", empirical.mean, -0.31, 3 * empirical.std_error, false},
  };

  auto report = open_output((dir / "report.txt").string());
  std::ostringstream body;
  body << "state vx=" << format_double(cfg.vx) << " vp=" << format_double(cfg.vp)
       << " filter_width=" << format_double(cfg.width) << " eta=" << format_double(cfg.eta)
       << " N=" << n << " seed=" << cfg.seed << " n_max=" << cfg.n_max << '\n'
       << "alpha=" << format_double(a0.real()) << (a0.imag() < 0 ? "-" : "+")
       << format_double(std::abs(a0.imag())) << "i\n"
       << "P=" << fixed(point.P, 6) << '\n'
       << "sigma_qm=" << fixed(point.sigma_qm, 6) << '\n'
       << "sigma_bhd=" << fixed(point.sigma_bhd, 6) << '\n'
       << "sigma_unbalanced=" << fixed(point.sigma_unbalanced, 6) << '\n'
       << "significance_balanced=" << fixed(sig_b, 3) << '\n'
       << "significance_unbalanced=" << fixed(sig_u, 3) << '\n'
       << "grid_min_P=" << fixed(min_row->P, 6) << " at " << format_double(coord(*min_row))
       << '\n'
       << "min_ratio_sigma_bhd_over_sigma_unbalanced=" << fixed(min_ratio, 3) << '\n'
       << "empirical_mean=" << fixed(empirical.mean, 6) << '\n'
       << "empirical_std_error=" << fixed(empirical.std_error, 6) << '\n'
       << "empirical_per_sample_variance=" << fixed(empirical.per_sample_variance, 3) << '\n'
       << "theory_per_sample_variance=" << fixed(theory_per_sample, 3) << '\n';
  for (const auto& c : checks) {
    const double dev = c.relative ? std::abs(c.value / c.target - 1.0) : std::abs(c.value - c.target);
    body << (dev <= c.tol ? "PASS " : "FAIL ") << c.name << " value=" << fixed(c.value, 4)
         << " target=" << general(c.target) << (c.relative ? " rel_tol=" : " abs_tol=")
         << format_double(c.tol) << '\n';
  }
  const bool ratio_ok = min_ratio > 3.0;
  body << (ratio_ok ? "PASS " : "FAIL ") << "sigma_bhd/sigma_unbalanced>3 min=" << fixed(min_ratio, 3)
       << '\n';
  report << body.str();
  out << body.str();
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::quadrature_nonconvergence:
    case ErrorKind::divergent_kernel:
    case ErrorKind::nonintegrable_operator:
    case ErrorKind::insufficient_range:
      return 3;
    case ErrorKind::io_error:
      return 4;
    default:
      return 2;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Homodyne tomography statistics: simulation, estimation and theoretical variances",
               "tomostat"};
  app.config_formatter(std::make_shared<SectionedConfig>());
  app.set_config("--config", "", "key=value file with [state] [filter] [alpha] [grid] [run] [io] sections");
  app.allow_config_extras(CLI::config_extras_mode::error);

  RunConfig cfg;
  app.add_option("--vx,--state.vx", cfg.vx, "x-quadrature variance (vacuum = 1)")->capture_default_str();
  app.add_option("--vp,--state.vp", cfg.vp, "p-quadrature variance")->capture_default_str();
  app.add_option("--cxp,--state.cxp", cfg.cxp, "symmetrized x-p covariance")->capture_default_str();
  app.add_option("--mean-re,--state.mean_re", cfg.mean_re, "Re <a>")->capture_default_str();
  app.add_option("--mean-im,--state.mean_im", cfg.mean_im, "Im <a>")->capture_default_str();
  app.add_option("--width,--filter.width", cfg.width, "nonclassicality filter width w")
      ->capture_default_str();
  app.add_option("--alpha-re,--alpha.re", cfg.alpha_re, "Re alpha for single-point commands")
      ->capture_default_str();
  app.add_option("--alpha-im,--alpha.im", cfg.alpha_im, "Im alpha for single-point commands")
      ->capture_default_str();
  app.add_option("--grid-min,--grid.min", cfg.grid_min, "first alpha grid coordinate")
      ->capture_default_str();
  app.add_option("--grid-max,--grid.max", cfg.grid_max, "last alpha grid coordinate")
      ->capture_default_str();
  app.add_option("--grid-step,--grid.step", cfg.grid_step, "alpha grid spacing")
      ->capture_default_str();
  app.add_option("--axis,--grid.axis", cfg.axis, "grid axis: real or imag")->capture_default_str();
  app.add_option("--n,--run.n", cfg.n, "number of measurements N")->capture_default_str();
  app.add_option("--seed,--run.seed", cfg.seed, "64-bit sampling seed")->capture_default_str();
  app.add_option("--eta,--run.eta", cfg.eta, "detection efficiency in (0, 1]")
      ->capture_default_str();
  app.add_option("--n-max,--run.n_max", cfg.n_max, "largest photon number for unbalanced detection")
      ->capture_default_str();
  app.add_option("--scheme,--run.scheme", cfg.scheme, "balanced, unbalanced or cascaded")
      ->capture_default_str();
  app.add_option("--t,--run.t", cfg.t, "cascaded scheme beamsplitter transmissivity")
      ->capture_default_str();
  app.add_option("--mix-re,--run.mix_re", cfg.mix_re, "cascaded scheme Re alpha")
      ->capture_default_str();
  app.add_option("--mix-im,--run.mix_im", cfg.mix_im, "cascaded scheme Im alpha")
      ->capture_default_str();
  app.add_option("--table-dx,--run.table_dx", cfg.table_dx, "pattern table spacing")
      ->capture_default_str();
  app.add_option("--input,--io.input", cfg.input, "quadrature file to read");
  app.add_option("--output,--io.output", cfg.output, "output file");
  app.add_option("--dir,--io.dir", cfg.dir, "output directory for reproduce-example")
      ->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "sample balanced-homodyne records to --output");
  auto* estimate = app.add_subcommand("estimate", "pattern-function estimate of P(alpha) from --input");
  auto* theory = app.add_subcommand("theory", "P, sigma_qm, sigma_bhd, sigma_unbalanced at alpha");
  auto* compare = app.add_subcommand("compare", "variance report CSV over the alpha grid");
  auto* reproduce =
      app.add_subcommand("reproduce-example", "figure data, gnuplot script and report in --dir");
  for (auto* sub : {simulate, estimate, theory, compare, reproduce}) sub->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.validate();
    if (*simulate) cmd_simulate(cfg, out);
    if (*estimate) cmd_estimate(cfg, out);
    if (*theory) cmd_theory(cfg, out);
    if (*compare) cmd_compare(cfg, out);
    if (*reproduce) cmd_reproduce_example(cfg, out);
  } catch (const Error& e) {
    err << "tomostat: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return 0;
}

}  // namespace tomostat::cli
