// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include "tomostat/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "tomostat/error.hpp"
#include "tomostat/format.hpp"
#include "tomostat/parallel.hpp"
#include "tomostat/quadrature.hpp"

namespace tomostat {

namespace {

constexpr double kPi = std::numbers::pi;

double growth_kernel(const KernelFn& kernel, double b) {
  return std::exp(kernel.log_at(b) + 0.5 * b * b);
}

// K(b) = Omega(b) e^{b^2/2} on [0, radius], 4-point Lagrange on a fine grid.
class SampledKernel {
 public:
  SampledKernel(const KernelFn& kernel, double radius, int intervals = 8192)
      : radius_(radius), step_(radius / intervals), values_(intervals + 4) {
    for (int i = 0; i < intervals + 4; ++i) values_[i] = growth_kernel(kernel, (i - 1) * step_);
  }

  double operator()(double b) const {
    if (b >= radius_) return 0.0;
    const double pos = b / step_ + 1.0;
    const int i = std::max(1, static_cast<int>(pos));
    const double t = pos - i;
    const double* v = &values_[i - 1];
    return -t * (t - 1.0) * (t - 2.0) / 6.0 * v[0] + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * v[1] -
           (t + 1.0) * t * (t - 2.0) / 2.0 * v[2] + (t + 1.0) * t * (t - 1.0) / 6.0 * v[3];
  }

 private:
  double radius_;
  double step_;
  std::vector<double> values_;
};

CharFn shifted_state(const CharFn& state, Complex alpha) {
  if (alpha == Complex(0.0, 0.0)) return state;
  return displace_cf(state, -alpha);
}

Moments make_moments(double mean, double second) {
  return {mean, second, second - mean * mean};
}

double checked_real(Complex value, const char* what) {
  if (std::abs(value.imag()) > 1e-9 * std::max(1.0, std::abs(value.real()))) {
    throw Error(ErrorKind::quadrature_nonconvergence,
                std::string(what) + ": imaginary residue " + format_double(value.imag()) +
                    " exceeds 1e-9");
  }
  return value.real();
}

// Composite Gauss-Legendre on [-radius, 0] and [0, radius], keeping the
// kink of |b| on a panel boundary.
quad::Rule symmetric_rule(double radius, double panel, int order) {
  auto rule = quad::composite_gauss_legendre(0.0, radius, panel, order);
  quad::Rule out;
  for (std::size_t i = rule.size(); i-- > 0;) {
    out.nodes.push_back(-rule.nodes[i]);
    out.weights.push_back(rule.weights[i]);
  }
  out.nodes.insert(out.nodes.end(), rule.nodes.begin(), rule.nodes.end());
  out.weights.insert(out.weights.end(), rule.weights.begin(), rule.weights.end());
  return out;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::empirical_bhd: return "empirical_bhd";
    case Method::empirical_single: return "empirical_single";
    case Method::theory_qm: return "theory_qm";
    case Method::theory_bhd: return "theory_bhd";
    case Method::theory_unbalanced: return "theory_unbalanced";
  }
  return "unknown";
}

double EstimateWithUncertainty::significance() const {
  return std_error > 0.0 ? std::abs(mean) / std_error : std::numeric_limits<double>::infinity();
}

EstimateWithUncertainty empirical_estimate_single(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) {
    throw Error(ErrorKind::insufficient_samples,
                "need at least 2 values for an empirical variance, got " + std::to_string(n));
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / (n - 1);
  return {mean, var, std::sqrt(var / n), n, Method::empirical_single};
}

namespace {

template <class Pattern>
EstimateWithUncertainty estimate_with(const QuadratureSampleSet& samples, Pattern&& f) {
  const auto& r = samples.records;
  if (r.size() < 2) {
    throw Error(ErrorKind::insufficient_samples,
                "need at least 2 quadrature records, got " + std::to_string(r.size()));
  }
  std::vector<double> values(r.size());
  parallel_for(r.size(), [&](std::size_t j) { values[j] = f(r[j].x, r[j].phi); });
  auto est = empirical_estimate_single(values);
  est.method = Method::empirical_bhd;
  return est;
}

}  // namespace

EstimateWithUncertainty empirical_estimate_bhd(const QuadratureSampleSet& samples,
                                               const PatternTable& table) {
  return estimate_with(samples, [&](double x, double phi) { return table(x, phi); });
}

EstimateWithUncertainty empirical_estimate_bhd(const QuadratureSampleSet& samples,
                                               const OperatorSpec& op) {
  return estimate_with(samples, [&](double x, double phi) { return pattern_value(op, x, phi); });
}

double expectation_via_cf(const CharFn& state, const CharFn& op, double radius) {
  const RadialGrid grid = RadialGrid::make(radius);
  const auto sums = polar_integrate(
      1, grid, [&](std::size_t i, Complex beta, std::span<Complex> out) {
        out[0] = grid.radii[i] * state(beta) * std::conj(op(beta)) / kPi;
      });
  return checked_real(sums[0], "expectation_via_cf");
}

double expectation_via_cf(const CharFn& state, const OperatorSpec& op) {
  return expectation_via_cf(state, op.cf(), op.cutoff());
}

EstimateWithUncertainty to_estimate(const Moments& m, std::size_t n, Method method) {
  const double var = std::max(m.variance, 0.0);
  return {m.mean, var, n > 0 ? std::sqrt(var / n) : 0.0, n, method};
}

TheoryEngine::TheoryEngine(const KernelFn& kernel) : kernel_(kernel) {
  cutoff_ = OperatorSpec{kernel, {0.0, 0.0}, std::nullopt}.cutoff();
  const double b_max = cutoff_;
  grid_ = RadialGrid::make(2.0 * b_max, 0.5, 12);
  const std::size_t n = grid_.size();
  profiles_.assign(3, std::vector<double>(n, 0.0));
  const SampledKernel k(kernel, b_max);

  // Cartesian rule for T(g): x in [-B, B], y in [0, B] (cos(g y) is even in y).
  const auto xr = quad::composite_gauss_legendre(-b_max, b_max, 0.5, 12);
  const auto yr = quad::composite_gauss_legendre(0.0, b_max, 0.5, 12);
  std::vector<double> k1(xr.size() * yr.size());
  for (std::size_t a = 0; a < xr.size(); ++a) {
    for (std::size_t c = 0; c < yr.size(); ++c) {
      k1[a * yr.size() + c] = xr.weights[a] * yr.weights[c] *
                              k(std::hypot(xr.nodes[a], yr.nodes[c]));
    }
  }

  parallel_for(n, [&](std::size_t i) {
    const double s = grid_.radii[i];
    profiles_[0][i] = s * k(s) / (kPi * kPi);

    // G(s): |b| K(|b|) |s - b| K(|s - b|) has kinks at 0 and s.
    double g = 0.0;
    const double lo = s - b_max;
    const double edges[] = {lo, std::min(0.0, b_max), std::min(s, b_max), b_max};
    for (int e = 0; e < 3; ++e) {
      const double a = std::max(edges[e], lo);
      const double b = edges[e + 1];
      if (!(b > a)) continue;
      const auto rule = quad::composite_gauss_legendre(a, b, 0.25, 12);
      g += rule.apply([&](double u) {
        return std::abs(u) * k(std::abs(u)) * std::abs(s - u) * k(std::abs(s - u));
      });
    }
    profiles_[1][i] = g / (kPi * kPi * kPi);

    double t = 0.0;
    for (std::size_t c = 0; c < yr.size(); ++c) {
      const double y = yr.nodes[c];
      const double phase = std::cos(s * y);
      double row = 0.0;
      for (std::size_t a = 0; a < xr.size(); ++a) {
        const double w = k1[a * yr.size() + c];
        if (w == 0.0) continue;
        row += w * k(std::hypot(s - xr.nodes[a], y));
      }
      t += phase * row;
    }
    profiles_[2][i] = s * 2.0 * t / (kPi * kPi * kPi * kPi);
  });
}

TheoryEngine::Summary TheoryEngine::evaluate(const CharFn& state, Complex alpha) const {
  const auto sums = radial_profile_integrals(shifted_state(state, alpha), grid_, profiles_);
  return {checked_real(sums[0], "mean"), checked_real(sums[1], "bhd second moment"),
          checked_real(sums[2], "qm second moment")};
}

Moments TheoryEngine::Summary::bhd() const { return make_moments(mean, bhd_second_moment); }
Moments TheoryEngine::Summary::qm() const { return make_moments(mean, qm_second_moment); }

double TheoryEngine::mean(const CharFn& state, Complex alpha) const {
  const auto sums = radial_profile_integrals(shifted_state(state, alpha), grid_, {profiles_[0]});
  return checked_real(sums[0], "mean");
}

Moments TheoryEngine::bhd(const CharFn& state, Complex alpha) const {
  const auto sums =
      radial_profile_integrals(shifted_state(state, alpha), grid_, {profiles_[0], profiles_[1]});
  return make_moments(checked_real(sums[0], "mean"), checked_real(sums[1], "bhd second moment"));
}

Moments TheoryEngine::qm(const CharFn& state, Complex alpha) const {
  const auto sums =
      radial_profile_integrals(shifted_state(state, alpha), grid_, {profiles_[0], profiles_[2]});
  return make_moments(checked_real(sums[0], "mean"), checked_real(sums[1], "qm second moment"));
}

std::vector<double> TheoryEngine::fock(int n_max) const {
  return fock_coefficients(kernel_, n_max);
}

Moments qm_variance(const CharFn& state, const OperatorSpec& op) {
  return TheoryEngine(op.kernel).qm(state, op.alpha);
}

Moments bhd_variance(const CharFn& state, const OperatorSpec& op) {
  return TheoryEngine(op.kernel).bhd(state, op.alpha);
}

Moments bhd_variance_direct(const CharFn& state, const CharFn& op, double radius, int phi_count,
                            double panel) {
  if (phi_count < 1) throw Error(ErrorKind::invalid_argument, "phi_count must be >= 1");
  const auto rule = symmetric_rule(radius, panel, 12);
  const std::size_t nb = rule.size();
  std::vector<double> first(phi_count), second(phi_count);
  parallel_for(static_cast<std::size_t>(phi_count), [&](std::size_t j) {
    const Complex dir = Complex(0.0, 1.0) * std::polar(1.0, kPi * j / phi_count);
    std::vector<Complex> h(nb);
    Complex m1 = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      const double b = rule.nodes[k];
      h[k] = rule.weights[k] * std::abs(b) * std::conj(op(b * dir));
      m1 += h[k] * state(b * dir);
    }
    Complex m2 = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      for (std::size_t l = 0; l < nb; ++l) {
        m2 += h[k] * h[l] * state((rule.nodes[k] + rule.nodes[l]) * dir);
      }
    }
    first[j] = checked_real(m1, "bhd direct mean");
    second[j] = checked_real(m2, "bhd direct second moment");
  });
  double m1 = 0.0, m2 = 0.0;
  for (int j = 0; j < phi_count; ++j) {
    m1 += first[j];
    m2 += second[j];
  }
  // dphi / pi with spacing pi / phi_count
  return make_moments(m1 / phi_count, m2 / phi_count);
}

namespace {

Moments qm_direct_level(const CharFn& state, const CharFn& op, double radius, int phi_count,
                        double panel) {
  const auto rule = symmetric_rule(radius, panel, 8);
  struct Point {
    Complex beta;
    Complex weight;  // w |b| Phi_F^*(beta) dphi
    double b;
    double phi;
  };
  std::vector<Point> pts;
  const double dphi = kPi / phi_count;
  for (int j = 0; j < phi_count; ++j) {
    const double phi = j * dphi;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double b = rule.nodes[k];
      const Complex beta = b * std::polar(1.0, phi);
      pts.push_back({beta, rule.weights[k] * std::abs(b) * std::conj(op(beta)) * dphi, b, phi});
    }
  }
  double mean = 0.0;
  for (const auto& p : pts) mean += (p.weight * state(p.beta)).real();
  std::vector<Complex> rows(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const Point& p = pts[i];
    Complex acc = 0.0;
    for (const Point& q : pts) {
      acc += q.weight * state(p.beta + q.beta) *
             std::polar(1.0, p.b * q.b * std::sin(p.phi - q.phi));
    }
    rows[i] = p.weight * acc;
  });
  Complex second = 0.0;
  for (const Complex& r : rows) second += r;
  return make_moments(mean / kPi, checked_real(second, "qm direct second moment") / (kPi * kPi));
}

}  // namespace

Moments qm_variance_direct(const CharFn& state, const CharFn& op, double radius, double rel_tol) {
  int phi_count = 16;
  double panel = 1.0;
  Moments previous = qm_direct_level(state, op, radius, phi_count, panel);
  for (int level = 0; level < 3; ++level) {
    phi_count *= 2;
    panel /= 2.0;
    const Moments current = qm_direct_level(state, op, radius, phi_count, panel);
    const double scale = std::max(std::abs(current.second_moment), 1e-300);
    if (std::abs(current.second_moment - previous.second_moment) <= rel_tol * scale) {
      return current;
    }
    previous = current;
  }
  throw Error(ErrorKind::quadrature_nonconvergence,
              "qm_variance_direct did not reach relative change " + format_double(rel_tol));
}

Moments bhd_variance_displaced(const CharFn& state0, double t, Complex alpha, Complex gamma,
                               const OperatorSpec& op, double eta) {
  CharFn state = beamsplitter_mix_cf(state0, t, alpha);
  if (eta != 1.0) state = apply_loss_cf(state, eta);
  return bhd_variance(state, op.displaced(gamma));
}

Moments cascaded_method1(const CharFn& state0, const OperatorSpec& op, Complex gamma,
                         double eta_d) {
  const CharFn state = eta_d == 1.0 ? state0 : apply_loss_cf(state0, eta_d);
  return bhd_variance(state, op.displaced(gamma).loss_compensated(std::sqrt(eta_d)));
}

Moments cascaded_method2(const CharFn& state0, const OperatorSpec& op, Complex gamma, double t,
                         double eta_d) {
  CharFn state = beamsplitter_mix_cf(state0, t, -gamma);
  if (eta_d != 1.0) state = apply_loss_cf(state, eta_d);
  return bhd_variance(state, op.loss_compensated(t * std::sqrt(eta_d)));
}

EstimateWithUncertainty unbalanced_uncertainty(std::span<const double> fock,
                                               const PhotonDistribution& p, std::size_t n) {
  if (fock.size() != p.p.size()) {
    throw Error(ErrorKind::length_mismatch,
                "F_n has " + std::to_string(fock.size()) + " entries but p_n has " +
                    std::to_string(p.p.size()));
  }
  if (n < 1) throw Error(ErrorKind::insufficient_samples, "N must be >= 1");
  double mean = 0.0, second = 0.0;
  for (std::size_t k = 0; k < fock.size(); ++k) {
    mean += fock[k] * p.p[k];
    second += fock[k] * fock[k] * p.p[k];
  }
  return to_estimate(make_moments(mean, second), n, Method::theory_unbalanced);
}

VarianceReport variance_report(const TheoryEngine& engine, std::span<const double> fock,
                               const GaussianState& state, Complex alpha, std::size_t n) {
  const auto summary = engine.evaluate(gaussian_cf(state), alpha);
  const auto dist = photon_number_distribution(state, alpha, static_cast<int>(fock.size()) - 1);
  VarianceReport row;
  row.alpha = alpha;
  row.P = summary.mean;
  row.sigma_qm = to_estimate(summary.qm(), n, Method::theory_qm).std_error;
  row.sigma_bhd = to_estimate(summary.bhd(), n, Method::theory_bhd).std_error;
  row.sigma_unbalanced = unbalanced_uncertainty(fock, dist, n).std_error;
  row.n = n;
  return row;
}

void write_variance_header(std::ostream& out) {
  out << "alpha_re,alpha_im,P,sigma_qm,sigma_bhd,sigma_unbalanced,N\n";
}

void write_variance_row(std::ostream& out, const VarianceReport& row) {
  out << format_double(row.alpha.real()) << ',' << format_double(row.alpha.imag()) << ','
      << format_double(row.P) << ',' << format_double(row.sigma_qm) << ','
      << format_double(row.sigma_bhd) << ',' << format_double(row.sigma_unbalanced) << ','
      << row.n << '\n';
}

}  // namespace tomostat
