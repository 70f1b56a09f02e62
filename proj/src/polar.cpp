// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include "tomostat/polar.hpp"

namespace tomostat {

std::vector<Complex> radial_profile_integrals(const CharFn& cf, const RadialGrid& grid,
                                              const std::vector<std::vector<double>>& profiles) {
  return polar_integrate(profiles.size(), grid,
                         [&](std::size_t i, Complex beta, std::span<Complex> out) {
                           const Complex value = cf(beta);
                           for (std::size_t k = 0; k < profiles.size(); ++k) {
                             out[k] = profiles[k][i] * value;
                           }
                         });
}

}  // namespace tomostat
