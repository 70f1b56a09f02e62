// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

// Phase-space integrals in polar coordinates beta = s e^{i phi}: composite
// Gauss-Legendre in s, trapezoid in phi (spectrally accurate for the
// periodic angular integrand). The angular count starts at 64 and doubles,
// reusing previous nodes, until successive estimates agree.

#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "tomostat/error.hpp"
#include "tomostat/phasespace.hpp"
#include "tomostat/quadrature.hpp"

namespace tomostat {

struct RadialGrid {
  std::vector<double> radii;
  std::vector<double> weights;

  static RadialGrid make(double radius, double panel_width = 0.25, int order = 12) {
    auto rule = quad::composite_gauss_legendre(0.0, radius, panel_width, order);
    return {std::move(rule.nodes), std::move(rule.weights)};
  }
  std::size_t size() const noexcept { return radii.size(); }
};

/// Computes I_k = \int_0^{2pi} dphi \sum_i w_i g_k(i, s_i e^{i phi}) for k < count.
/// `integrand(i, beta, out)` writes g_k into out[k]. Convergence is declared
/// once every |I_k(2M) - I_k(M)| <= tol_k, tol_k = rel_tol * (angular L1 mass).
template <class Integrand>
std::vector<Complex> polar_integrate(std::size_t count, const RadialGrid& grid,
                                     Integrand&& integrand, double rel_tol = 1e-11,
                                     int max_angles = 1 << 14) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<Complex> sums(count), values(count);
  std::vector<double> mass(count);
  auto add_angle = [&](double phi) {
    const Complex dir = std::polar(1.0, phi);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      integrand(i, grid.radii[i] * dir, std::span<Complex>(values));
      for (std::size_t k = 0; k < count; ++k) {
        sums[k] += grid.weights[i] * values[k];
        mass[k] += grid.weights[i] * std::abs(values[k]);
      }
    }
  };
  int m = 64;
  for (int j = 0; j < m; ++j) add_angle(two_pi * j / m);
  std::vector<Complex> previous(count);
  for (std::size_t k = 0; k < count; ++k) previous[k] = sums[k] * (two_pi / m);
  while (true) {
    if (m >= max_angles) {
      throw Error(ErrorKind::quadrature_nonconvergence,
                  "angular refinement exceeded " + std::to_string(max_angles) + " points");
    }
    for (int j = 0; j < m; ++j) add_angle(two_pi * (2 * j + 1) / (2 * m));
    m *= 2;
    bool converged = true;
    for (std::size_t k = 0; k < count; ++k) {
      const Complex current = sums[k] * (two_pi / m);
      const double tol = rel_tol * mass[k] * (two_pi / m) + 1e-300;
      if (std::abs(current - previous[k]) > tol) converged = false;
      previous[k] = current;
    }
    if (converged) return previous;
  }
}

/// \int d^2 beta profile_k(|beta|) Phi(beta) for each radial profile sampled on
/// `grid` (profiles[k][i] is the value at grid.radii[i], including the
/// polar Jacobian s).
std::vector<Complex> radial_profile_integrals(const CharFn& cf, const RadialGrid& grid,
                                              const std::vector<std::vector<double>>& profiles);

}  // namespace tomostat
