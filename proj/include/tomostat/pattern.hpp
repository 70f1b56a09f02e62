// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

// Balanced-homodyne pattern functions
//   f(x, phi) = \int db |b| e^{i b x} Phi_F^*(i b e^{i phi})
// and lookup tables for Monte Carlo estimation.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "tomostat/observables.hpp"

namespace tomostat {

/// Direct evaluation from the operator's characteristic function:
/// f = \int_0^B b 2 Re[e^{i b x} Phi_F^*(i b e^{i phi})] db with B the
/// operator cutoff. Gauss-Legendre panels (order 10) no wider than
/// panel_scale * min(0.25, pi / (4 (|x| + 2|alpha|) + 1)).
/// Throws nonintegrable_operator for operators without a decaying CF.
double pattern_value(const OperatorSpec& op, double x, double phi, double panel_scale = 1.0);

/// Phase-independent profile of a displaced radial operator,
///   g(u) = (2/pi) \int_0^B b Omega(b) e^{b^2/2} cos(b u) db,
/// so that f(x, phi; alpha) = g(x - 2 Re(alpha e^{-i phi})).
double pattern_profile(const OperatorSpec& op, double u);

/// Stable 64-bit FNV-1a fingerprint of an operator: kernel name, kernel
/// samples on a fixed grid and the displacement.
std::uint64_t operator_hash(const OperatorSpec& op);

/// Tabulated pattern function. Radial operators only need the 1D profile
/// g(u) (shifted by 2 Re(alpha e^{-i phi})), so the phase grid always
/// collapses to a single column; the requested phi_count is kept as
/// metadata. Interpolation is 6-point Lagrange in u.
class PatternTable {
 public:
  /// Tabulates on the declared x range [x_min, x_max] with spacing dx.
  /// Throws insufficient_range for a degenerate grid (dx >= range).
  static PatternTable build(const OperatorSpec& op, double x_min, double x_max, double dx,
                            int phi_count);

  /// f(x, phi). Throws insufficient_range when x is outside the declared range.
  double operator()(double x, double phi) const;
  bool covers(double x) const noexcept { return x >= x_min_ && x <= x_max_; }

  /// Same profile for another displacement; only valid if the profile range
  /// still covers every shift, otherwise insufficient_range.
  PatternTable retarget(const OperatorSpec& op) const;

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double dx() const noexcept { return profile_->spacing; }
  int phi_count() const noexcept { return phi_count_; }
  int effective_phi_count() const noexcept { return 1; }
  Complex alpha() const noexcept { return alpha_; }
  std::uint64_t hash() const noexcept { return hash_; }
  std::size_t size() const noexcept { return profile_->values.size(); }

  /// Cache file: one header line
  ///   # tomostat-pattern v1 hash=<hex> base_hash=<hex> alpha_re=.. alpha_im=..
///     x_min=.. x_max=..
  ///     u_min=.. du=.. count=.. phi_count=.. order=6
  /// followed by `count` lines with one profile value each.
  void write(std::ostream& out) const;
  static PatternTable read(std::istream& in);

 private:
  struct Profile {
    double u_min = 0.0;
    double spacing = 0.01;
    std::vector<double> values;
    std::uint64_t base_hash = 0;  // hash of the undisplaced operator
  };
  double profile_at(double u) const;

  std::shared_ptr<const Profile> profile_;
  double x_min_ = 0.0, x_max_ = 0.0;
  int phi_count_ = 1;
  Complex alpha_{0.0, 0.0};
  std::uint64_t hash_ = 0;
};

}  // namespace tomostat
