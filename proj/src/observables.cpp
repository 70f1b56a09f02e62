// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include "tomostat/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tomostat/error.hpp"
#include "tomostat/laguerre.hpp"
#include "tomostat/quadrature.hpp"

namespace tomostat {

namespace {

constexpr double kPi = std::numbers::pi;
// ln of the window prefactor squared, ln((2/pi)^{3/2}).
const double kLogWindowNorm2 = 1.5 * std::log(2.0 / kPi);

// e^{-z} I_0(z) for z >= 0.
double scaled_bessel_i0(double z) {
  if (z < 600.0) return std::exp(-z) * std::cyl_bessel_i(0.0, z);
  // Asymptotic series; the terms shrink fast for z this large.
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 12; ++k) {
    term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * z);
    sum += term;
  }
  return sum / std::sqrt(2.0 * kPi * z);
}

// ln A(d) for the window autocorrelation. With midpoint coordinates the
// exponent -|u - d/2|^4 - |u + d/2|^4 becomes -d^4/8 - 2 rho^2 (rho^2 + d^2/2)
// - 2 x^2 d^2; the angular integral is closed-form, leaving
//   A(d) = c^2 pi e^{-d^4/8} \int_0^inf e^{-2u^2 - u d^2} e^{-z} I_0(z) du,  z = u d^2.
double log_window_autocorrelation(double d) {
  const double d2 = d * d;
  auto integrand = [d2](double u) {
    return std::exp(-2.0 * u * u - u * d2) * scaled_bessel_i0(u * d2);
  };
  // e^{-2u^2} < 1e-40 beyond u = 7.
  const auto r = quad::integrate(integrand, 0.0, 7.0, 0.0, 1e-13);
  return kLogWindowNorm2 + std::log(kPi * r.value) - 0.125 * d2 * d2;
}

// 6-point Lagrange interpolation on a uniform grid starting at 0.
double lagrange6(const std::vector<double>& values, double spacing, double x) {
  const int n = static_cast<int>(values.size());
  const double pos = x / spacing;
  int first = static_cast<int>(std::floor(pos)) - 2;
  first = std::clamp(first, 0, n - 6);
  double sum = 0.0;
  for (int j = 0; j < 6; ++j) {
    double l = 1.0;
    const double xj = first + j;
    for (int m = 0; m < 6; ++m) {
      if (m != j) l *= (pos - (first + m)) / (xj - (first + m));
    }
    sum += l * values[first + j];
  }
  return sum;
}

}  // namespace

double KernelFn::log_at(double b) const {
  if (log_value) return log_value(b);
  const double v = std::abs(value(b));
  return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

double filter_window(Complex beta) {
  const double r2 = std::norm(beta);
  return std::pow(2.0 / kPi, 0.75) * std::exp(-r2 * r2);
}

KernelFn s_kernel(double s) {
  KernelFn k;
  k.value = [s](double b) { return std::exp(-0.5 * (1.0 - s) * b * b); };
  k.log_value = [s](double b) { return -0.5 * (1.0 - s) * b * b; };
  k.name = "s-kernel(s=" + std::to_string(s) + ")";
  return k;
}

NonclassicalityFilter::NonclassicalityFilter(double width) : width_(width) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw Error(ErrorKind::invalid_argument, "filter width must be positive");
  }
  auto table = std::make_shared<Table>();
  // Stop once the kernel, even after multiplication by e^{b^2}, is far below
  // double resolution (plus a stencil's worth of margin).
  int past_threshold = 0;
  for (int i = 0; past_threshold < 6; ++i) {
    const double d = i * table->spacing;
    const double log_a = log_window_autocorrelation(d);
    table->log_values.push_back(log_a);
    if (d > 1.0 && log_a + width * width * d * d < -80.0) ++past_threshold;
  }
  table_ = std::move(table);
}

double NonclassicalityFilter::window_autocorrelation(double d) {
  return std::exp(log_window_autocorrelation(std::abs(d)));
}

double NonclassicalityFilter::log_autocorrelation(double b) const {
  const double d = std::abs(b) / width_;
  const double last = (table_->log_values.size() - 1) * table_->spacing;
  if (d > last) return -std::numeric_limits<double>::infinity();
  return lagrange6(table_->log_values, table_->spacing, d);
}

double NonclassicalityFilter::autocorrelation(double b) const {
  return std::exp(log_autocorrelation(b));
}

KernelFn NonclassicalityFilter::kernel() const {
  KernelFn k;
  NonclassicalityFilter self = *this;
  k.value = [self](double b) { return self.autocorrelation(b); };
  k.log_value = [self](double b) { return self.log_autocorrelation(b); };
  k.name = "filter(w=" + std::to_string(width_) + ")";
  return k;
}

std::optional<double> decay_radius(const KernelFn& kernel, double growth, double threshold,
                                   double max_radius) {
  if (kernel.distributional) return std::nullopt;
  const double log_threshold = std::log(threshold);
  const double step = 0.01;
  double last_above = 0.0;
  bool any_above = false;
  for (double b = 0.0; b <= max_radius; b += step) {
    if (kernel.log_at(b) + growth * b * b >= log_threshold) {
      last_above = b;
      any_above = true;
    }
  }
  if (any_above && last_above > max_radius - 2.0 * step) return std::nullopt;
  return any_above ? last_above + step : step;
}

CharFn OperatorSpec::cf() const {
  if (kernel.distributional) {
    throw Error(ErrorKind::nonintegrable_operator,
                kernel.name + " has no pointwise characteristic function");
  }
  return CharFn(
      [k = kernel, a = alpha](Complex beta) {
        const double r2 = std::norm(beta);
        const double magnitude = std::exp(k.log_at(std::sqrt(r2)) + 0.5 * r2) / kPi;
        // e^{alpha^* beta - alpha beta^*} = e^{2 i Im(alpha^* beta)}
        const double phase = 2.0 * (std::conj(a) * beta).imag();
        return magnitude * Complex(std::cos(phase), std::sin(phase));
      },
      CfKind::observable);
}

double OperatorSpec::cutoff(double threshold) const {
  const auto r = decay_radius(kernel, 0.5, threshold);
  if (!r) {
    throw Error(ErrorKind::nonintegrable_operator,
                kernel.name + ": Omega(b) e^{b^2/2} does not decay; the operator is not "
                              "representable by an integrable characteristic function");
  }
  return *r;
}

OperatorSpec OperatorSpec::displaced(Complex gamma) const {
  OperatorSpec out = *this;
  out.alpha += gamma;
  return out;
}

OperatorSpec OperatorSpec::loss_compensated(double t) const {
  if (!(t > 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::invalid_transmissivity,
                "transmissivity must lie in (0, 1], got " + std::to_string(t));
  }
  OperatorSpec out;
  const KernelFn base = kernel;
  out.kernel.value = [base, t](double b) { return t * t * base(t * b); };
  out.kernel.log_value = [base, t](double b) { return 2.0 * std::log(t) + base.log_at(t * b); };
  out.kernel.name = base.name + "|compensated(t=" + std::to_string(t) + ")";
  out.kernel.distributional = base.distributional;
  out.alpha = t * alpha;
  return out;
}

OperatorSpec operator_cf(const NonclassicalityFilter& filter, Complex alpha) {
  return OperatorSpec{filter.kernel(), alpha, std::nullopt};
}

OperatorSpec s_operator(double s, Complex alpha) {
  return OperatorSpec{s_kernel(s), alpha, std::nullopt};
}

OperatorSpec identity_operator() {
  KernelFn k;
  k.value = [](double) -> double {
    throw Error(ErrorKind::nonintegrable_operator, "identity kernel is a delta function");
  };
  k.name = "identity";
  k.distributional = true;
  return OperatorSpec{k, {0.0, 0.0}, std::vector<double>{}};
}

std::vector<double> fock_coefficients(const KernelFn& kernel, int n_max) {
  if (n_max < 0) throw Error(ErrorKind::invalid_argument, "n_max must be >= 0");
  if (kernel.distributional) {
    throw Error(ErrorKind::divergent_kernel, kernel.name + " is not a function");
  }
  // Scan the tail of max_n |b Omega(b) L_n(b^2)|; it must fall below 1e-16
  // well before the scan limit.
  const double limit = 60.0, step = 0.01, log_threshold = std::log(1e-16);
  std::vector<double> lag(n_max + 1);
  double radius = 0.0;
  for (double b = step; b <= limit; b += step) {
    laguerre_all(b * b, lag);
    double worst = 0.0;
    for (double l : lag) worst = std::max(worst, std::abs(l));
    if (std::log(b) + kernel.log_at(b) + std::log(worst) >= log_threshold) radius = b;
  }
  if (radius > limit - 1.0) {
    throw Error(ErrorKind::divergent_kernel,
                kernel.name + ": b Omega(b) L_n(b^2) is not integrable on [0, inf)");
  }
  std::vector<double> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    auto integrand = [&](double b) { return b * kernel(b) * laguerre(n, b * b); };
    out[n] = 2.0 / kPi * quad::integrate(integrand, 0.0, radius + step, 1e-12, 1e-12).value;
  }
  return out;
}

}  // namespace tomostat
