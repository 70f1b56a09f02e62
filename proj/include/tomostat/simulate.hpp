// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic measurement data: phase-uniform balanced-homodyne records and
// photon-number distributions of displaced Gaussian (or arbitrary CF) states.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tomostat/phasespace.hpp"

namespace tomostat {

struct QuadratureSample {
  double x = 0.0;
  double phi = 0.0;  // [0, pi)
};

struct QuadratureSampleSet {
  std::uint64_t seed = 0;
  std::vector<QuadratureSample> records;

  std::size_t size() const noexcept { return records.size(); }
};

enum class Scheme { balanced, unbalanced, cascaded };

struct ExperimentConfig {
  GaussianState state;
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  double eta = 1.0;
  Scheme scheme = Scheme::balanced;
  // cascaded scheme only: beamsplitter transmissivity and coherent amplitude
  double t = 1.0;
  Complex alpha{0.0, 0.0};

  void validate() const;
  /// The state reaching an ideal detector: optional beamsplitter mixing
  /// followed by the loss channel eta.
  GaussianState measured_state() const;
};

/// Gaussian p(x; phi) with mean <x_phi> and variance V(phi).
double quadrature_pdf(const GaussianState& state, double x, double phi);

/// p_pd(x) = (1/pi) \int_0^pi p(x; phi) dphi.
double phase_diffused_pdf(const GaussianState& state, double x);

/// N i.i.d. records: phi uniform on [0, pi), x ~ p(x; phi) of the measured
/// state. Record j uses Philox block (j, lane 0) for (phi, u1) and block
/// (j, lane 1) for u2; x = <x_phi> + sqrt(V(phi)) sqrt(-2 ln(1 - u1)) cos(2 pi u2).
/// The mapping is part of the file-format contract and must not change.
QuadratureSampleSet sample_quadratures(const ExperimentConfig& config);

struct PhotonDistribution {
  std::vector<double> p;  // p_0..p_{n_max}
  int n_max = 0;
  double truncation_mass = 0.0;  // 1 - sum p_n
  std::vector<std::string> warnings;
};

/// p_n = (1/pi) \int Phi(beta) e^{alpha beta^* - alpha^* beta} e^{-|beta|^2/2}
/// L_n(|beta|^2) d^2 beta: photon statistics of D(-alpha) rho D(alpha), the
/// state an unbalanced detector sees when probing the point alpha.
/// Negative values above -1e-10 are clamped to zero with a warning; lower
/// values raise quadrature_nonconvergence.
PhotonDistribution photon_number_distribution(const CharFn& state, Complex alpha, int n_max);
PhotonDistribution photon_number_distribution(const GaussianState& state, Complex alpha,
                                              int n_max);

/// Extension: N photon-count records drawn from `dist` (inverse CDF, lane 2
/// of the counter RNG). Counts above n_max are reported as n_max + 1.
std::vector<int> sample_photon_counts(const PhotonDistribution& dist, std::size_t n,
                                      std::uint64_t seed);

// Text formats.
//   quadratures: "# tomostat-quadratures v1 seed=<u64> N=<n>" then "x<TAB>phi" lines
//   photon distribution: CSV "n,p_n"
void write_quadratures(std::ostream& out, const QuadratureSampleSet& set);
QuadratureSampleSet read_quadratures(std::istream& in);
void save_quadratures(const std::string& path, const QuadratureSampleSet& set);
QuadratureSampleSet load_quadratures(const std::string& path);
void write_photon_distribution(std::ostream& out, const PhotonDistribution& dist);

}  // namespace tomostat
