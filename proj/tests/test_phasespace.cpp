// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "tomostat/error.hpp"
#include "tomostat/phasespace.hpp"
#include "tomostat/quadrature.hpp"

using namespace tomostat;
using std::numbers::pi;

namespace {

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }

Complex random_beta(oracle::RandomStates& rs, double scale = 2.0) {
  return {rs.uniform(-scale, scale), rs.uniform(-scale, scale)};
}

// Fourier transform of the Gaussian quadrature density at phase phi,
// \int p(x; phi) e^{i b x} dx with beta = i b e^{i phi}, by Simpson.
Complex cf_from_density(double mean, double var, double b) {
  const double sd = std::sqrt(var);
  auto re = oracle::simpson(
      [&](double x) {
        return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * pi * var) *
               std::cos(b * x);
      },
      mean - 14 * sd, mean + 14 * sd, 4000);
  auto im = oracle::simpson(
      [&](double x) {
        return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * pi * var) *
               std::sin(b * x);
      },
      mean - 14 * sd, mean + 14 * sd, 4000);
  return {re, im};
}

}  // namespace

TEST_SUITE("phasespace") {
  TEST_CASE("gaussian cf examples") {
    const auto vac = GaussianState::vacuum();
    const auto sq = GaussianState::squeezed(0.5, 2.0);
    CHECK(close(eval_gaussian_cf(vac, 0.0), 1.0, 1e-15));
    CHECK(close(eval_gaussian_cf(sq, Complex(0, 1)), cf_from_density(0.0, 0.5, 1.0), 1e-10));
    CHECK(close(eval_gaussian_cf(sq, Complex(0, 1)), std::exp(-0.25), 1e-15));
    CHECK(close(eval_gaussian_cf(vac, 1.0), cf_from_density(0.0, 1.0, 1.0), 1e-10));
    CHECK(close(eval_gaussian_cf(vac, 1.0), std::exp(-0.5), 1e-15));
  }

  TEST_CASE("cf agrees with the Fourier transform of the quadrature density") {
    oracle::RandomStates rs(11);
    for (int k = 0; k < 20; ++k) {
      GaussianState s;
      rs.covariance(s.vx, s.vp, s.cxp);
      s.mean = random_beta(rs, 1.0);
      const double phi = rs.uniform(0.0, pi), b = rs.uniform(-3.0, 3.0);
      const double mean = 2.0 * (s.mean * std::polar(1.0, -phi)).real();
      const double var = s.vx * std::cos(phi) * std::cos(phi) + s.vp * std::sin(phi) * std::sin(phi) +
                         2 * s.cxp * std::sin(phi) * std::cos(phi);
      CHECK(s.quadrature_mean(phi) == doctest::Approx(mean).epsilon(1e-14));
      CHECK(s.quadrature_variance(phi) == doctest::Approx(var).epsilon(1e-14));
      const Complex beta = Complex(0, 1) * b * std::polar(1.0, phi);
      CHECK(close(eval_gaussian_cf(s, beta), cf_from_density(mean, var, b), 1e-9));
      CHECK(close(eval_gaussian_cf(s, beta),
                  oracle::gaussian_cf(s.mean.real(), s.mean.imag(), s.vx, s.vp, s.cxp, beta), 1e-14));
    }
  }

  TEST_CASE("state cf invariants: normalization, hermiticity, bound") {
    oracle::RandomStates rs(12);
    for (int k = 0; k < 10; ++k) {
      GaussianState s;
      rs.covariance(s.vx, s.vp, s.cxp);
      s.mean = random_beta(rs, 1.0);
      const auto cf = gaussian_cf(s);
      const auto mixed = beamsplitter_mix_cf(cf, rs.uniform(0.1, 1.0), random_beta(rs));
      const auto lossy = apply_loss_cf(mixed, rs.uniform(0.1, 1.0));
      const auto shifted = displace_cf(lossy, random_beta(rs));
      for (const CharFn* f : {&cf, &mixed, &lossy, &shifted}) {
        CHECK(f->kind() == CfKind::state);
        CHECK(close((*f)(0.0), 1.0, 1e-15));
        for (int j = 0; j < 10; ++j) {
          const Complex beta = random_beta(rs);
          CHECK(close((*f)(-beta), std::conj((*f)(beta)), 1e-14));
          CHECK(std::abs((*f)(beta)) <= 1.0 + 1e-15);
        }
      }
    }
  }

  TEST_CASE("physicality of single-mode states") {
    CHECK(GaussianState::squeezed(0.5, 2.0).is_physical());
    CHECK_FALSE(GaussianState::squeezed(0.5, 1.5).is_physical());
    CHECK_THROWS_AS(GaussianState::squeezed(0.5, 1.5).validate(), Error);
    CHECK_THROWS_AS(gaussian_cf(GaussianState::squeezed(-1.0, 2.0)), Error);
  }

  TEST_CASE("displace_cf") {
    const auto vac = gaussian_cf(GaussianState::vacuum());
    const Complex i(0, 1);
    CHECK(close(displace_cf(vac, 1.0)(i), std::exp(-0.5) * std::exp(2.0 * i), 1e-15));
    oracle::RandomStates rs(13);
    const auto sq = gaussian_cf(GaussianState::squeezed(0.5, 2.0));
    const Complex g = random_beta(rs);
    const auto back = displace_cf(displace_cf(sq, g), -g);
    const auto same = displace_cf(sq, 0.0);
    for (int j = 0; j < 50; ++j) {
      const Complex beta = random_beta(rs);
      CHECK(close(back(beta), sq(beta), 1e-14));
      CHECK(close(same(beta), sq(beta), 0.0));
      CHECK(std::abs(displace_cf(sq, g)(beta)) == doctest::Approx(std::abs(sq(beta))).epsilon(1e-14));
      // displacing the vacuum gives the coherent state
      CHECK(close(displace_cf(vac, g)(beta), gaussian_cf(GaussianState::coherent(g))(beta), 1e-14));
    }
  }

  TEST_CASE("beamsplitter mixing") {
    const auto sq_state = GaussianState::squeezed(0.5, 2.0);
    const auto sq = gaussian_cf(sq_state);
    const auto vac = gaussian_cf(GaussianState::vacuum());
    const Complex i(0, 1);
    CHECK(close(beamsplitter_mix_cf(sq, 0.9, 0.0)(i), std::exp(-0.81 * 0.25) * std::exp(-0.19 / 2),
                1e-15));
    CHECK(close(gaussian_cf(sq_state.mixed(0.9, 0.0))(i), std::exp(-0.81 * 0.25) * std::exp(-0.19 / 2),
                1e-15));
    oracle::RandomStates rs(14);
    for (int j = 0; j < 50; ++j) {
      const Complex beta = random_beta(rs), a = random_beta(rs, 1.0);
      const double t = rs.uniform(0.05, 1.0);
      CHECK(close(beamsplitter_mix_cf(sq, 1.0, 0.0)(beta), sq(beta), 1e-15));
      CHECK(close(beamsplitter_mix_cf(vac, t, 0.0)(beta), vac(beta), 1e-15));
      CHECK(close(beamsplitter_mix_cf(sq, t, a)(beta), gaussian_cf(sq_state.mixed(t, a))(beta), 1e-14));
    }
    CHECK_THROWS_AS(beamsplitter_mix_cf(sq, 0.0, 0.0), Error);
    CHECK_THROWS_AS(beamsplitter_mix_cf(sq, 1.2, 0.0), Error);
    try {
      beamsplitter_mix_cf(sq, -0.5, 0.0);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_transmissivity);
    }
  }

  TEST_CASE("loss channel composition and beamsplitter equivalence") {
    const auto sq_state = GaussianState::squeezed(0.5, 2.0);
    const auto sq = gaussian_cf(sq_state);
    const auto vac = gaussian_cf(GaussianState::vacuum());
    oracle::RandomStates rs(15);
    for (int j = 0; j < 100; ++j) {
      const Complex beta = random_beta(rs);
      const double e1 = rs.uniform(0.05, 1.0), e2 = rs.uniform(0.05, 1.0);
      CHECK(close(apply_loss_cf(sq, 1.0)(beta), sq(beta), 0.0));
      CHECK(close(apply_loss_cf(vac, 0.5)(beta), vac(beta), 1e-15));
      CHECK(close(apply_loss_cf(apply_loss_cf(sq, e1), e2)(beta), apply_loss_cf(sq, e1 * e2)(beta),
                  1e-12));
      CHECK(close(apply_loss_cf(sq, e1)(beta), gaussian_cf(sq_state.with_loss(e1))(beta), 1e-14));
      CHECK(close(apply_loss_cf(beamsplitter_mix_cf(sq, 0.8, 1.0), 0.64)(beta),
                  beamsplitter_mix_cf(sq, 0.64, 1.0)(beta), 1e-12));
    }
    CHECK_THROWS_AS(apply_loss_cf(sq, 0.0), Error);
    CHECK_THROWS_AS(apply_loss_cf(sq, 1.5), Error);
  }

  TEST_CASE("phase averaging") {
    const auto sq = gaussian_cf(GaussianState::squeezed(0.5, 2.0));
    const auto avg = phase_average_cf(sq);
    for (double r : {0.3, 1.0, 2.2}) {
      const auto ref = quad::integrate(
          [&](double th) { return sq(std::polar(r, th)).real(); }, 0.0, 2 * pi, 1e-14);
      CHECK(avg(std::polar(r, 0.7)).real() == doctest::Approx(ref.value / (2 * pi)).epsilon(1e-11));
      CHECK(std::abs(avg(std::polar(r, 0.7)) - avg(std::polar(r, 2.1))) < 1e-13);
    }
    const auto vac = gaussian_cf(GaussianState::vacuum());
    CHECK(close(phase_average_cf(vac)(Complex(0.4, 1.1)), vac(Complex(0.4, 1.1)), 1e-14));
  }

  TEST_CASE("bipartite covariance structure") {
    const auto id = bipartite_covariance(1, 1, 0);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) CHECK(id(r, c) == ((r % 2) == (c % 2) ? 1.0 : 0.0));
    const auto worked = bipartite_covariance(0.5, 2.0, 0.0);
    CHECK(worked(0, 0) == 0.5);
    CHECK(worked(2, 2) == 0.5);
    CHECK(worked(0, 2) == 0.5);
    CHECK(worked(1, 3) == 2.0);
    CHECK(worked(0, 1) == 0.0);
    oracle::RandomStates rs(16);
    for (int k = 0; k < 20; ++k) {
      double vx, vp, c;
      rs.covariance(vx, vp, c);
      const auto m = bipartite_covariance(vx, vp, c);
      Eigen::Matrix4d e;
      for (int r = 0; r < 4; ++r)
        for (int cc = 0; cc < 4; ++cc) {
          e(r, cc) = m(r, cc);
          CHECK(m(r, cc) == m(cc, r));
        }
      const Eigen::FullPivLU<Eigen::Matrix4d> lu(e);
      CHECK(lu.rank() <= 2);
    }
  }

  TEST_CASE("physicality check") {
    TwoModeCovariance two_vacua;
    for (int i = 0; i < 4; ++i) two_vacua(i, i) = 1.0;
    CHECK(physicality_check(two_vacua).physical);

    const auto res = physicality_check(bipartite_covariance(0.5, 2.0, 0.0));
    CHECK_FALSE(res.physical);
    CHECK(res.min_eigenvalue < 0.0);
    REQUIRE(res.block_minor.has_value());
    CHECK(*res.block_minor == doctest::Approx(-0.5).epsilon(1e-12));

    oracle::RandomStates rs(17);
    for (int k = 0; k < 50; ++k) {
      double vx, vp, c;
      rs.covariance(vx, vp, c);
      const auto m = bipartite_covariance(vx, vp, c);
      const auto r = physicality_check(m);
      CHECK_FALSE(r.physical);
      // cofactor expansion of the (x1, p1, x2) block of C + i Omega
      const Complex i(0, 1);
      const Complex a[3][3] = {{vx, c + i, vx}, {c - i, vp, c}, {vx, c, vx}};
      const Complex det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                          a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                          a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
      CHECK(std::abs(det - (-vx)) < 1e-12);
      CHECK(std::abs(leading_block_minor(m) - (-vx)) < 1e-12);
    }
  }
}
