// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

// Gauss-Legendre rules, composite panel rules and a globally adaptive
// Gauss-Kronrod (7/15) integrator.

#pragma once

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "tomostat/error.hpp"

namespace tomostat::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  auto apply(F&& f) const {
    using R = decltype(f(0.0));
    R acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule gauss_legendre(int n);

/// Composite Gauss-Legendre on [a, b]: equal panels no wider than
/// max_panel_width, `order` nodes each.
Rule composite_gauss_legendre(double a, double b, double max_panel_width, int order);

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes kKronrodNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

template <class F>
Interval gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodNodes[i];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[i] * s;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * s;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive G7/K15 on [a, b]. Bisects the interval with the largest
/// error estimate until the total error is below max(abs_tol, rel_tol*|I|).
/// Throws quadrature_nonconvergence when max_intervals is exhausted.
template <class F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                 int max_intervals = 4000) {
  if (a == b) return {};
  std::priority_queue<detail::Interval> heap;
  const int initial = 4;
  const double step = (b - a) / initial;
  double total = 0.0, error = 0.0;
  for (int i = 0; i < initial; ++i) {
    const double lo = a + i * step;
    const double hi = (i + 1 == initial) ? b : lo + step;
    auto piece = detail::gk15(f, lo, hi);
    total += piece.value;
    error += piece.error;
    heap.push(piece);
  }
  int count = initial;
  while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (count >= max_intervals) {
      throw Error(ErrorKind::quadrature_nonconvergence,
                  "adaptive integral on [" + std::to_string(a) + ", " + std::to_string(b) +
                      "] stalled at error " + std::to_string(error));
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  double value = 0.0, err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {value, err, count};
}

}  // namespace tomostat::quad
