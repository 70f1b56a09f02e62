// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

// Phase-space arithmetic on characteristic functions.
//
// Conventions used throughout the library:
//   D(beta) = exp(beta a^dagger - beta^* a),  Phi(beta) = Tr{rho D(beta)}.
//   The quadrature at phase phi is x_phi = a e^{-i phi} + a^dagger e^{i phi},
//   so the vacuum variance is 1 and Phi(i b e^{i phi}) = <exp(i b x_phi)>.
//   Covariance entries are ordered (x, p) per mode, x = x_0, p = x_{pi/2};
//   the two-mode ordering is (x1, p1, x2, p2).

#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>

namespace tomostat {

using Complex = std::complex<double>;

/// Single-mode Gaussian state: coherent amplitude <a> plus the quadrature
/// covariance (V_x, V_p, C_xp) in vacuum-variance-one units.
struct GaussianState {
  Complex mean{0.0, 0.0};
  double vx = 1.0;
  double vp = 1.0;
  double cxp = 0.0;

  static GaussianState vacuum() { return {}; }
  static GaussianState coherent(Complex amplitude) { return {amplitude, 1.0, 1.0, 0.0}; }
  static GaussianState squeezed(double vx, double vp, double cxp = 0.0) {
    return {{0.0, 0.0}, vx, vp, cxp};
  }

  /// V_x, V_p > 0 and V_x V_p - C_xp^2 >= 1 (up to `tol`).
  bool is_physical(double tol = 1e-12) const;
  /// Throws invalid_state unless is_physical() and all fields finite.
  void validate() const;

  /// <x_phi> = 2 Re(<a> e^{-i phi}).
  double quadrature_mean(double phi) const;
  /// V(phi) = V_x cos^2 + V_p sin^2 + 2 C_xp sin cos.
  double quadrature_variance(double phi) const;

  /// State after mixing with a coherent state on a beamsplitter of
  /// transmissivity t (coherent amplitude chosen so the output mean is
  /// t(<a> + alpha)). Throws invalid_transmissivity unless 0 < t <= 1.
  GaussianState mixed(double t, Complex alpha) const;
  /// Loss channel of efficiency eta: V -> eta V + (1 - eta).
  GaussianState with_loss(double eta) const;
  GaussianState displaced(Complex gamma) const;
};

enum class CfKind { state, observable };

/// Characteristic function: a pure evaluator beta -> Phi(beta).
class CharFn {
 public:
  using Evaluator = std::function<Complex(Complex)>;

  CharFn(Evaluator evaluator, CfKind kind) : eval_(std::move(evaluator)), kind_(kind) {}

  Complex operator()(Complex beta) const { return eval_(beta); }
  CfKind kind() const noexcept { return kind_; }

 private:
  Evaluator eval_;
  CfKind kind_;
};

/// Phi(beta) = exp(i b <x_phi> - b^2 V(phi) / 2) for beta = i b e^{i phi}.
Complex eval_gaussian_cf(const GaussianState& state, Complex beta);
CharFn gaussian_cf(const GaussianState& state);

/// Phi(beta) e^{beta gamma^* - beta^* gamma}.
CharFn displace_cf(CharFn cf, Complex gamma);

/// Phi0(t beta) e^{t alpha^* beta - t alpha beta^*} e^{-(1-t^2)|beta|^2/2}.
CharFn beamsplitter_mix_cf(CharFn cf, double t, Complex alpha);

/// Phi(sqrt(eta) beta) e^{-(1-eta)|beta|^2/2}.
CharFn apply_loss_cf(CharFn cf, double eta);

/// (1/2pi) \int Phi(beta e^{i theta}) d theta: the CF of the completely
/// phase-diffused state. The angular trapezoid rule is refined until it
/// converges to ~1e-13 relative.
CharFn phase_average_cf(CharFn cf);

struct TwoModeCovariance {
  std::array<double, 16> entries{};  // row-major, (x1, p1, x2, p2)

  double operator()(int row, int col) const { return entries[row * 4 + col]; }
  double& operator()(int row, int col) { return entries[row * 4 + col]; }
};

/// C2 = [[C1, C1], [C1, C1]]: covariance matrix of the bipartite function
/// Phi(beta' + beta'').
TwoModeCovariance bipartite_covariance(double vx, double vp, double cxp);

struct PhysicalityResult {
  bool physical = true;
  /// Smallest eigenvalue of the Hermitian matrix C + i Omega.
  double min_eigenvalue = 0.0;
  /// det of the (x1, p1, x2) principal block of C + i Omega, reported when
  /// C has the replicated block structure (it equals -V_x there).
  std::optional<double> block_minor;
};

/// Physical iff every eigenvalue of C + i Omega is >= -tolerance, with
/// Omega = diag(J, J), J = [[0, 1], [-1, 0]].
PhysicalityResult physicality_check(const TwoModeCovariance& cov, double tolerance = 1e-10);

/// det of the 3x3 principal block (x1, p1, x2) of C + i Omega.
Complex leading_block_minor(const TwoModeCovariance& cov);

}  // namespace tomostat
