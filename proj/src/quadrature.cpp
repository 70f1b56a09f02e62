// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include "tomostat/quadrature.hpp"

#include <numbers>
#include <utility>

namespace tomostat::quad {

namespace {

// Returns (P_n(x), P_n'(x)) from the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

Rule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "Gauss-Legendre order must be >= 1");
  Rule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  if (n == 1) {
    rule.weights[0] = 2.0;
    return rule;
  }
  for (int i = 0; i < n / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    const double dp = legendre_with_derivative(n, 0.0).second;
    rule.weights[n / 2] = 2.0 / (dp * dp);
  }
  return rule;
}

Rule composite_gauss_legendre(double a, double b, double max_panel_width, int order) {
  if (!(max_panel_width > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "panel width must be positive");
  }
  const Rule base = gauss_legendre(order);
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel_width)));
  const double width = (b - a) / panels;
  Rule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
  rule.weights.reserve(static_cast<std::size_t>(panels) * order);
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double c = lo + 0.5 * width;
    for (int i = 0; i < order; ++i) {
      rule.nodes.push_back(c + 0.5 * width * base.nodes[i]);
      rule.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return rule;
}

}  // namespace tomostat::quad
