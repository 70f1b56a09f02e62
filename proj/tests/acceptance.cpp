// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks for the worked example (squeezed state V_x = 0.5,
// V_p = 2, filter width 1.8). Usage: acceptance [criterion...]; with no
// arguments every criterion runs. Prints one PASS/FAIL line per criterion
// and exits non-zero if any failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "tomostat/estimators.hpp"
#include "tomostat/laguerre.hpp"

using namespace tomostat;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += std::string(ok ? "" : "FAILED ") + what;
  }
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

bool within_rel(double value, double target, double tol) {
  return std::abs(value / target - 1.0) <= tol;
}

const GaussianState kState = GaussianState::squeezed(0.5, 2.0);
constexpr std::size_t kN = 100000;

const NonclassicalityFilter& filter() {
  static const NonclassicalityFilter f(1.8);
  return f;
}

const TheoryEngine& engine() {
  static const TheoryEngine e(filter().kernel());
  return e;
}

std::vector<double> real_grid(double step) {
  std::vector<double> g;
  const int steps = static_cast<int>(std::lround(6.0 / step));
  for (int k = 0; k <= steps; ++k) g.push_back((k - steps / 2) * step);
  return g;
}

void physical_state(std::mt19937_64& gen, GaussianState& s) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = 0.8 * u(gen), th = pi * u(gen), nu = 1.0 + 0.8 * u(gen);
  const double a = nu * std::exp(-2 * r), b = nu * std::exp(2 * r);
  s.vx = a * std::cos(th) * std::cos(th) + b * std::sin(th) * std::sin(th);
  s.vp = a * std::sin(th) * std::sin(th) + b * std::cos(th) * std::cos(th);
  s.cxp = (b - a) * std::sin(th) * std::cos(th);
}

Outcome criterion1() {
  Outcome o;
  const auto sq = gaussian_cf(kState);
  const double p = expectation_via_cf(sq, operator_cf(filter(), 0.6));
  o.require(std::abs(p + 0.31) <= 0.02, "P(0.6)=" + num(p) + " target -0.31+-0.02");
  double best = 1e300;
  std::vector<double> values;
  const auto grid = real_grid(0.05);
  for (double a : grid) values.push_back(engine().mean(sq, a));
  for (double v : values) best = std::min(best, v);
  bool located = false;
  std::string where;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] <= best + 1e-12 * std::abs(best)) {
      where += (where.empty() ? "" : ",") + num(grid[i]);
      located = located || std::abs(grid[i] - 0.6) <= 0.05 + 1e-12;
    }
  }
  o.require(located, "grid minimum at alpha in {" + where + "} target 0.6+-0.05");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto sq = gaussian_cf(kState);
  const auto bhd = engine().bhd(sq, 0.6);
  const double sigma_b = std::sqrt(bhd.variance / kN);
  o.require(within_rel(sigma_b, 0.191, 0.10), "sigma_b(0.6)=" + num(sigma_b) + " target 0.191+-10%");
  ExperimentConfig cfg;
  cfg.state = kState;
  cfg.n = kN;
  cfg.seed = 20260419;
  const auto samples = sample_quadratures(cfg);
  const auto est = empirical_estimate_bhd(
      samples, PatternTable::build(operator_cf(filter(), 0.6), -12.0, 12.0, 0.01, 64));
  o.require(within_rel(est.per_sample_variance, bhd.variance, 0.05),
            "Monte Carlo per-sample variance " + num(est.per_sample_variance, 6) + " vs integral " +
                num(bhd.variance, 6) + " within 5%");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto fock = engine().fock(20);
  const auto sq = gaussian_cf(kState);
  const auto u = unbalanced_uncertainty(fock, photon_number_distribution(kState, 0.6, 20), kN);
  o.require(within_rel(u.std_error, 0.010, 0.10), "sigma_u(0.6)=" + num(u.std_error) + " target 0.010+-10%");
  o.require(within_rel(u.significance(), 31.0, 0.15),
            "unbalanced significance " + num(u.significance()) + " target 31+-15%");
  const auto b = to_estimate(engine().bhd(sq, 0.6), kN, Method::theory_bhd);
  o.require(within_rel(b.significance(), 1.6, 0.15),
            "balanced significance " + num(b.significance()) + " target 1.6+-15%");
  double worst = 1e300, at = 0.0;
  for (double a : real_grid(0.05)) {
    const auto row = variance_report(engine(), fock, kState, a, kN);
    const double ratio = row.sigma_bhd / row.sigma_unbalanced;
    if (ratio < worst) {
      worst = ratio;
      at = a;
    }
  }
  o.require(worst > 3.0, "min sigma_b/sigma_u on [-3,3] = " + num(worst) + " at alpha=" + num(at) + " target > 3");
  return o;
}

Outcome criterion4() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.n = 1000000;
  cfg.seed = 404;
  const auto set = sample_quadratures(cfg);
  std::vector<double> x2;
  x2.reserve(set.size());
  // fixed phase: the vacuum quadrature distribution does not depend on phi
  for (const auto& r : set.records) x2.push_back(r.x * r.x);
  const auto e = empirical_estimate_single(x2);
  const double se_var = std::sqrt(56.0 / set.size());
  o.require(std::abs(e.per_sample_variance - 2.0) <= 3 * se_var,
            "Var(x^2)=" + num(e.per_sample_variance, 6) + " target 2 +- " + num(3 * se_var, 3));

  const Complex alpha(1.5, 0.0);
  const double lambda = std::norm(alpha);
  const auto dist = photon_number_distribution(GaussianState::coherent(alpha), 0.0, 40);
  const auto counts = sample_photon_counts(dist, 1000000, 405);
  std::vector<double> n(counts.begin(), counts.end());
  const auto c = empirical_estimate_single(n);
  const double se_n = std::sqrt((lambda + 2 * lambda * lambda) / counts.size());
  o.require(std::abs(c.per_sample_variance - lambda) <= 3 * se_n,
            "Var(n)=" + num(c.per_sample_variance, 6) + " target |alpha|^2=" + num(lambda) + " +- " +
                num(3 * se_n, 3));
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    GaussianState s;
    physical_state(gen, s);
    s.mean = Complex(u(gen), u(gen));
    const Complex a(1.5 * u(gen), 1.5 * u(gen));
    const auto op = operator_cf(filter(), a);
    const double spread = std::sqrt(std::max(s.quadrature_variance(0.0), s.quadrature_variance(pi / 2)) +
                                    std::abs(s.cxp));
    const double range = std::ceil(2 * std::abs(s.mean) + 8 * spread) + 1;
    const auto table = PatternTable::build(op, -range, range, 0.01, 64);
    double total = 0.0;
    const int nphi = 64;
    for (int j = 0; j < nphi; ++j) {
      const double phi = pi * j / nphi;
      const double m = s.quadrature_mean(phi), sd = std::sqrt(s.quadrature_variance(phi));
      const auto rule = quad::composite_gauss_legendre(m - 8 * sd, m + 8 * sd, 0.05, 8);
      total += rule.apply([&](double x) { return quadrature_pdf(s, x, phi) * table(x, phi); });
    }
    total /= nphi;
    worst = std::max(worst, std::abs(total - expectation_via_cf(gaussian_cf(s), op)));
  }
  o.require(worst < 1e-6, "max |<f>_data - Tr(rho F)| over 10 configurations = " + num(worst, 3));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto sq = gaussian_cf(kState);
  const auto avg = phase_average_cf(sq);
  for (const auto& [name, kernel] : {std::pair<std::string, KernelFn>{"filter", filter().kernel()},
                                     std::pair<std::string, KernelFn>{"Q", s_kernel(-1.0)}}) {
    const TheoryEngine e(kernel);
    const double a = e.bhd(sq, 0.0).variance, b = e.bhd(avg, 0.0).variance;
    const double rel = std::abs(a - b) / std::abs(a);
    o.require(rel < 1e-6, name + " relative change " + num(rel, 3));
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto sq = gaussian_cf(kState);
  const auto op = operator_cf(filter(), 0.0);
  const auto m1 = cascaded_method1(sq, op, 0.6);
  const auto m2 = cascaded_method2(sq, op, 0.6, 0.9);
  o.require(m2.variance >= m1.variance,
            "method-2 variance " + num(m2.variance, 6) + " >= method-1 " + num(m1.variance, 6));
  o.require(std::abs(m1.mean - m2.mean) < 1e-6, "mean difference " + num(std::abs(m1.mean - m2.mean), 3));
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Complex beta(u(gen), u(gen)), a(u(gen) / 3, u(gen) / 3);
    const double t = 0.99 * std::abs(u(gen)) / 3 + 0.01, eta = 0.99 * std::abs(u(gen)) / 3 + 0.01;
    const Complex lhs = apply_loss_cf(beamsplitter_mix_cf(sq, t, a), eta)(beta);
    const Complex rhs = beamsplitter_mix_cf(sq, t * std::sqrt(eta), a)(beta);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  o.require(worst < 1e-12, "loss equivalence max deviation " + num(worst, 3));
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::mt19937_64 gen(8);
  int unphysical = 0;
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    GaussianState s;
    physical_state(gen, s);
    if (!s.is_physical()) {
      o.require(false, "generated an unphysical single-mode state");
      continue;
    }
    const auto res = physicality_check(bipartite_covariance(s.vx, s.vp, s.cxp));
    if (!res.physical) ++unphysical;
    const Complex minor = leading_block_minor(bipartite_covariance(s.vx, s.vp, s.cxp));
    worst = std::max(worst, std::abs(minor + s.vx));
  }
  o.require(unphysical == 50, std::to_string(unphysical) + "/50 bipartite matrices unphysical");
  o.require(worst < 1e-12, "max |minor + V_x| = " + num(worst, 3));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto w = fock_coefficients(s_kernel(0.0), 10);
  const auto q = fock_coefficients(s_kernel(-1.0), 10);
  double ew = 0.0, eq = 0.0;
  for (int n = 0; n <= 10; ++n) {
    ew = std::max(ew, std::abs(w[n] - (n % 2 ? -2.0 : 2.0) / pi));
    eq = std::max(eq, std::abs(q[n] - (n == 0 ? 1.0 / pi : 0.0)));
  }
  o.require(ew < 1e-8, "Wigner F_n max error " + num(ew, 3));
  o.require(eq < 1e-8, "Q F_n max error " + num(eq, 3));
  const auto f = fock_coefficients(filter().kernel(), 10);
  const auto op = operator_cf(filter(), 0.0);
  double ec = 0.0;
  for (int n = 0; n <= 10; ++n) {
    const CharFn fock_state([n](Complex b) -> Complex {
      const double r2 = std::norm(b);
      return std::exp(-0.5 * r2) * laguerre(n, r2);
    }, CfKind::state);
    ec = std::max(ec, std::abs(expectation_via_cf(fock_state, op) - f[n]));
  }
  o.require(ec < 1e-6, "Fock/CF consistency max error " + num(ec, 3));
  return o;
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome criterion10() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "tomostat-acceptance";
  fs::remove_all(root);
  auto run = [&](const std::string& threads, const std::string& name) {
    setenv("TOMOSTAT_THREADS", threads.c_str(), 1);
    const std::string dir = (root / name).string();
    const char* argv[] = {"tomostat", "reproduce-example", "--seed", "17", "--dir", dir.c_str()};
    std::ostringstream out, err;
    const int code = cli::run(6, argv, out, err);
    unsetenv("TOMOSTAT_THREADS");
    return code;
  };
  const int c1 = run("1", "a"), c2 = run("1", "b"), c3 = run("4", "c");
  o.require(c1 == 0 && c2 == 0 && c3 == 0, "reproduce-example exit codes");
  int identical = 0, total = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const auto name = entry.path().filename();
    ++total;
    const auto a = read_all(entry.path());
    if (a == read_all(root / "b" / name) && a == read_all(root / "c" / name)) ++identical;
  }
  o.require(total > 0 && identical == total,
            std::to_string(identical) + "/" + std::to_string(total) +
                " files byte-identical across runs and thread counts 1/4");
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> all = {
      {"quasiprobability value and minimum location", criterion1},
      {"balanced-homodyne uncertainty", criterion2},
      {"unbalanced uncertainty, significances and ratio", criterion3},
      {"single-observable quantum level", criterion4},
      {"unbiasedness of the pattern estimator", criterion5},
      {"phase-diffusion neutrality", criterion6},
      {"cascaded-scheme penalty and loss equivalence", criterion7},
      {"bipartite unphysicality", criterion8},
      {"kernel special cases and Fock/CF consistency", criterion9},
      {"determinism across runs and thread counts", criterion10},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (std::size_t i = 1; i <= criteria().size(); ++i) selected.push_back(static_cast<int>(i));
  }
  int failures = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria().size())) {
      std::printf("FAIL criterion %d: unknown criterion\n", id);
      ++failures;
      continue;
    }
    const auto& [name, check] = criteria()[id - 1];
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s [%s] (%.1f s)\n", outcome.pass ? "PASS" : "FAIL", id,
                name.c_str(), outcome.detail.c_str(), secs);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
