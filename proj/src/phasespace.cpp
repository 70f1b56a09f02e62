// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include "tomostat/phasespace.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "tomostat/error.hpp"

namespace tomostat {

namespace {

void check_transmissivity(double t) {
  if (!(t > 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::invalid_transmissivity,
                "transmissivity must lie in (0, 1], got " + std::to_string(t));
  }
}

void check_efficiency(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(ErrorKind::invalid_efficiency,
                "efficiency must lie in (0, 1], got " + std::to_string(eta));
  }
}

// exp(beta gamma^* - beta^* gamma) = exp(2 i Im(beta gamma^*))
Complex displacement_phase(Complex beta, Complex gamma) {
  const double arg = 2.0 * (beta * std::conj(gamma)).imag();
  return {std::cos(arg), std::sin(arg)};
}

}  // namespace

bool GaussianState::is_physical(double tol) const {
  return vx > 0.0 && vp > 0.0 && vx * vp - cxp * cxp >= 1.0 - tol;
}

void GaussianState::validate() const {
  const bool finite = std::isfinite(mean.real()) && std::isfinite(mean.imag()) &&
                      std::isfinite(vx) && std::isfinite(vp) && std::isfinite(cxp);
  if (!finite || !is_physical()) {
    throw Error(ErrorKind::invalid_state,
                "Gaussian state violates V_x, V_p > 0 and V_x V_p - C_xp^2 >= 1 (V_x=" +
                    std::to_string(vx) + ", V_p=" + std::to_string(vp) +
                    ", C_xp=" + std::to_string(cxp) + ")");
  }
}

double GaussianState::quadrature_mean(double phi) const {
  return 2.0 * (mean * std::polar(1.0, -phi)).real();
}

double GaussianState::quadrature_variance(double phi) const {
  const double c = std::cos(phi), s = std::sin(phi);
  return vx * c * c + vp * s * s + 2.0 * cxp * s * c;
}

GaussianState GaussianState::mixed(double t, Complex alpha) const {
  check_transmissivity(t);
  const double t2 = t * t;
  return {t * (mean + alpha), t2 * vx + (1.0 - t2), t2 * vp + (1.0 - t2), t2 * cxp};
}

GaussianState GaussianState::with_loss(double eta) const {
  check_efficiency(eta);
  return mixed(std::sqrt(eta), {0.0, 0.0});
}

GaussianState GaussianState::displaced(Complex gamma) const {
  return {mean + gamma, vx, vp, cxp};
}

Complex eval_gaussian_cf(const GaussianState& state, Complex beta) {
  const double br = beta.real(), bi = beta.imag();
  const double quadratic = state.vx * bi * bi + state.vp * br * br - 2.0 * state.cxp * br * bi;
  // mean term: <a>^* beta - <a> beta^* = 2 i Im(<a>^* beta)
  const double phase = 2.0 * (std::conj(state.mean) * beta).imag();
  return std::exp(-0.5 * quadratic) * Complex(std::cos(phase), std::sin(phase));
}

CharFn gaussian_cf(const GaussianState& state) {
  state.validate();
  return CharFn([state](Complex beta) { return eval_gaussian_cf(state, beta); }, CfKind::state);
}

CharFn displace_cf(CharFn cf, Complex gamma) {
  const CfKind kind = cf.kind();
  return CharFn(
      [cf = std::move(cf), gamma](Complex beta) { return cf(beta) * displacement_phase(beta, gamma); },
      kind);
}

CharFn beamsplitter_mix_cf(CharFn cf, double t, Complex alpha) {
  check_transmissivity(t);
  const CfKind kind = cf.kind();
  return CharFn(
      [cf = std::move(cf), t, alpha](Complex beta) {
        const double r2 = std::norm(beta);
        return cf(t * beta) * displacement_phase(beta, t * alpha) *
               std::exp(-0.5 * (1.0 - t * t) * r2);
      },
      kind);
}

CharFn apply_loss_cf(CharFn cf, double eta) {
  check_efficiency(eta);
  return beamsplitter_mix_cf(std::move(cf), std::sqrt(eta), {0.0, 0.0});
}

CharFn phase_average_cf(CharFn cf) {
  const CfKind kind = cf.kind();
  return CharFn(
      [cf = std::move(cf)](Complex beta) {
        auto trapezoid = [&](int m) {
          Complex acc{};
          for (int k = 0; k < m; ++k) {
            acc += cf(beta * std::polar(1.0, 2.0 * std::numbers::pi * k / m));
          }
          return acc / static_cast<double>(m);
        };
        int m = 64;
        Complex prev = trapezoid(m);
        while (m < 16384) {
          m *= 2;
          const Complex next = trapezoid(m);
          if (std::abs(next - prev) <= 1e-13 * std::abs(next) + 1e-300) return next;
          prev = next;
        }
        throw Error(ErrorKind::quadrature_nonconvergence,
                    "phase average did not converge at |beta| = " + std::to_string(std::abs(beta)));
      },
      kind);
}

TwoModeCovariance bipartite_covariance(double vx, double vp, double cxp) {
  TwoModeCovariance c;
  const double block[2][2] = {{vx, cxp}, {cxp, vp}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c(i, j) = block[i % 2][j % 2];
  return c;
}

namespace {

Eigen::Matrix4cd with_symplectic_form(const TwoModeCovariance& cov) {
  Eigen::Matrix4cd m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = cov(i, j);
  const Complex i1{0.0, 1.0};
  for (int mode = 0; mode < 2; ++mode) {
    m(2 * mode, 2 * mode + 1) += i1;
    m(2 * mode + 1, 2 * mode) -= i1;
  }
  return m;
}

bool has_replicated_blocks(const TwoModeCovariance& cov) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double v = cov(i, j);
      if (cov(i + 2, j) != v || cov(i, j + 2) != v || cov(i + 2, j + 2) != v) return false;
    }
  return true;
}

}  // namespace

Complex leading_block_minor(const TwoModeCovariance& cov) {
  const Eigen::Matrix3cd block = with_symplectic_form(cov).topLeftCorner<3, 3>();
  return block.determinant();
}

PhysicalityResult physicality_check(const TwoModeCovariance& cov, double tolerance) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(with_symplectic_form(cov),
                                                         Eigen::EigenvaluesOnly);
  PhysicalityResult result;
  result.min_eigenvalue = solver.eigenvalues().minCoeff();
  result.physical = result.min_eigenvalue >= -tolerance;
  if (has_replicated_blocks(cov)) result.block_minor = leading_block_minor(cov).real();
  return result;
}

}  // namespace tomostat
