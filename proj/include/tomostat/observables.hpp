// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

// Observables built from radial kernels: s-parameterized quasiprobability
// kernels, the nonclassicality filter, displaced operator characteristic
// functions and Fock-diagonal coefficients.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tomostat/phasespace.hpp"

namespace tomostat {

/// Radial kernel Omega(b), b >= 0. `log_value` is optional; when present it
/// is used for tail tests where Omega underflows but Omega e^{b^2} does not.
struct KernelFn {
  std::function<double(double)> value;
  std::function<double(double)> log_value;
  std::string name;
  /// True for kernels that only exist as distributions (the identity
  /// operator's delta function). Such kernels cannot be evaluated.
  bool distributional = false;

  double operator()(double b) const { return value(b); }
  double log_at(double b) const;
};

/// omega(beta) = (2/pi)^{3/4} exp(-|beta|^4).
double filter_window(Complex beta);

/// Omega(b; s) = exp(-(1 - s) b^2 / 2).
KernelFn s_kernel(double s);

/// Nonclassicality filter Omega_w(b) = \int omega(beta') omega(beta' + b/w) d^2 beta'.
///
/// The autocorrelation A(d) of the window is tabulated once per instance as
/// log A on a uniform grid (spacing 0.01) and interpolated with a 6-point
/// Lagrange stencil, so the relative accuracy holds deep in the tail where
/// the kernel is later multiplied by e^{b^2}. The table extends until
/// log A(d) + (w d)^2 < -80. Instances are cheap to copy (shared table).
class NonclassicalityFilter {
 public:
  explicit NonclassicalityFilter(double width);

  double width() const noexcept { return width_; }
  /// Omega_w(b); even in b.
  double autocorrelation(double b) const;
  double log_autocorrelation(double b) const;
  KernelFn kernel() const;

  /// One table entry computed from scratch by nested adaptive quadrature
  /// (window autocorrelation at offset d, not divided by w).
  static double window_autocorrelation(double d);

 private:
  struct Table {
    double spacing = 0.01;
    std::vector<double> log_values;
  };
  double width_;
  std::shared_ptr<const Table> table_;
};

/// Radius beyond which |Omega(b)| e^{growth b^2} stays below `threshold`,
/// scanned on [0, max_radius]. Empty if the tail never decays.
std::optional<double> decay_radius(const KernelFn& kernel, double growth, double threshold,
                                   double max_radius = 60.0);

/// Observable
///   Phi_F(beta) = pi^{-1} Omega(|beta|) e^{|beta|^2/2} e^{alpha^* beta - alpha beta^*},
/// i.e. the phase-insensitive operator with kernel Omega displaced to alpha.
struct OperatorSpec {
  KernelFn kernel;
  Complex alpha{0.0, 0.0};
  std::optional<std::vector<double>> fock;

  CharFn cf() const;
  /// Radius where Omega(b) e^{b^2/2} < threshold. Throws
  /// nonintegrable_operator for distributional or non-decaying kernels.
  double cutoff(double threshold = 1e-14) const;

  OperatorSpec displaced(Complex gamma) const;
  /// Operator whose expectation on data lossy with efficiency t^2 reproduces
  /// this operator's expectation on the lossless state:
  /// Omega'(b) = t^2 Omega(t b), alpha' = t alpha.
  OperatorSpec loss_compensated(double t) const;
};

/// The displaced filtered operator used for nonclassicality quasiprobabilities.
OperatorSpec operator_cf(const NonclassicalityFilter& filter, Complex alpha);
/// Operator of the s-parameterized quasiprobability at alpha.
OperatorSpec s_operator(double s, Complex alpha);
/// The identity operator, whose CF is pi delta^2(beta).
OperatorSpec identity_operator();

/// F_n = (2/pi) \int_0^infty b Omega(b) L_n(b^2) db for n = 0..n_max.
/// Throws divergent_kernel if b^{2 n_max + 1} Omega(b) does not decay.
std::vector<double> fock_coefficients(const KernelFn& kernel, int n_max);

}  // namespace tomostat
