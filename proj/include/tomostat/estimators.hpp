// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

// Empirical estimators and theoretical variances of quasiprobability
// estimates from balanced and unbalanced homodyne data.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tomostat/observables.hpp"
#include "tomostat/pattern.hpp"
#include "tomostat/polar.hpp"
#include "tomostat/simulate.hpp"

namespace tomostat {

enum class Method { empirical_bhd, empirical_single, theory_qm, theory_bhd, theory_unbalanced };

std::string to_string(Method method);

struct EstimateWithUncertainty {
  double mean = 0.0;
  double per_sample_variance = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  Method method = Method::empirical_single;

  /// |mean| / std_error.
  double significance() const;
};

/// Sample mean, unbiased (N - 1) variance and std error sqrt(var / N).
/// Throws insufficient_samples for fewer than two values.
EstimateWithUncertainty empirical_estimate_single(std::span<const double> values);

/// Pattern-function estimate from balanced-homodyne records.
EstimateWithUncertainty empirical_estimate_bhd(const QuadratureSampleSet& samples,
                                               const PatternTable& table);
/// Same, evaluating the pattern function directly per record (slow).
EstimateWithUncertainty empirical_estimate_bhd(const QuadratureSampleSet& samples,
                                               const OperatorSpec& op);

/// Tr{rho F} = pi^{-1} \int Phi(beta) Phi_F^*(beta) d^2 beta over |beta| <= radius.
/// Throws quadrature_nonconvergence if the imaginary residue exceeds 1e-9.
double expectation_via_cf(const CharFn& state, const CharFn& op, double radius);
double expectation_via_cf(const CharFn& state, const OperatorSpec& op);

struct Moments {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
};

EstimateWithUncertainty to_estimate(const Moments& m, std::size_t n, Method method);

/// Per-kernel radial tables for the theory integrals. With the state CF
/// shifted to Phi'(beta) = Phi(beta) e^{2 i Im(alpha beta^*)}, every quantity
/// reduces to \int_0^{2pi} dphi \int_0^R ds h(s) Phi'(s e^{i phi}):
///   mean            h = s K(s) / pi^2,
///   BHD 2nd moment  h = G(s) / pi^3,  G(s) = \int db |b| K(|b|) |s - b| K(|s - b|),
///   QM 2nd moment   h = s T(s) / pi^4,
///     T(g) = \iint dx dy K(|x + iy|) K(|g - x - iy|) cos(g y),
/// where K(b) = Omega(b) e^{b^2/2}. R is twice the kernel cutoff.
class TheoryEngine {
 public:
  explicit TheoryEngine(const KernelFn& kernel);

  const KernelFn& kernel() const noexcept { return kernel_; }
  double cutoff() const noexcept { return cutoff_; }

  double mean(const CharFn& state, Complex alpha) const;
  Moments bhd(const CharFn& state, Complex alpha) const;
  Moments qm(const CharFn& state, Complex alpha) const;

  struct Summary {
    double mean = 0.0;
    double bhd_second_moment = 0.0;
    double qm_second_moment = 0.0;
    Moments bhd() const;
    Moments qm() const;
  };
  /// All three integrals from one pass over the phase-space grid.
  Summary evaluate(const CharFn& state, Complex alpha) const;

  /// F_n, n = 0..n_max.
  std::vector<double> fock(int n_max) const;

 private:
  KernelFn kernel_;
  double cutoff_ = 0.0;
  RadialGrid grid_;
  std::vector<std::vector<double>> profiles_;  // mean, bhd, qm
};

Moments qm_variance(const CharFn& state, const OperatorSpec& op);
Moments bhd_variance(const CharFn& state, const OperatorSpec& op);

/// Direct BHD second moment (triple integral, no radial reduction):
///   pi^{-1} \int_0^pi dphi \iint db' db'' |b'| |b''| Phi_F^*(i b' e^{i phi})
///       Phi_F^*(i b'' e^{i phi}) Phi(i (b' + b'') e^{i phi}),
/// on [-radius, radius]^2 with `phi_count` phases and panel width `panel`.
Moments bhd_variance_direct(const CharFn& state, const CharFn& op, double radius,
                            int phi_count = 96, double panel = 0.25);

/// Direct QM second moment from the operator product
///   Phi_{F^2}(g) = pi^{-1} \int d^2b Phi_F(b) Phi_F(g - b) e^{i Im(b g^*)}
/// by nested polar quadrature; panels halve until the relative change is
/// below `rel_tol`.
Moments qm_variance_direct(const CharFn& state, const CharFn& op, double radius,
                           double rel_tol = 1e-4);

/// BHD moments on the state prepared by mixing with a coherent amplitude
/// alpha at transmissivity t, then loss eta, for the operator displaced by
/// gamma. Throws invalid_transmissivity / invalid_efficiency.
Moments bhd_variance_displaced(const CharFn& state0, double t, Complex alpha, Complex gamma,
                               const OperatorSpec& op, double eta = 1.0);

/// Displaced operator estimated on lossy (eta_d) data with loss compensation.
Moments cascaded_method1(const CharFn& state0, const OperatorSpec& op, Complex gamma,
                         double eta_d = 1.0);
/// State mixed with -gamma at transmissivity t before lossy (eta_d) detection;
/// the undisplaced operator is compensated for the total efficiency t^2 eta_d.
Moments cascaded_method2(const CharFn& state0, const OperatorSpec& op, Complex gamma, double t,
                         double eta_d = 1.0);

/// Linear error propagation of F = sum_n F_n |n><n| over counted photons:
/// mean sum F_n p_n, per-sample variance sum F_n^2 p_n - mean^2.
/// Throws length_mismatch when F and p differ in length.
EstimateWithUncertainty unbalanced_uncertainty(std::span<const double> fock,
                                               const PhotonDistribution& p, std::size_t n);

struct VarianceReport {
  Complex alpha{0.0, 0.0};
  double P = 0.0;
  double sigma_qm = 0.0;
  double sigma_bhd = 0.0;
  double sigma_unbalanced = 0.0;
  std::size_t n = 0;
};

/// P(alpha) and the three standard errors at sample size n; sigma_unbalanced
/// uses the photon distribution truncated at fock.size() - 1.
VarianceReport variance_report(const TheoryEngine& engine, std::span<const double> fock,
                               const GaussianState& state, Complex alpha, std::size_t n);

void write_variance_header(std::ostream& out);
void write_variance_row(std::ostream& out, const VarianceReport& row);

}  // namespace tomostat
