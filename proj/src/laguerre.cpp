// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include "tomostat/laguerre.hpp"

#include "tomostat/error.hpp"

namespace tomostat {

double laguerre(int n, double x) {
  if (n < 0) throw Error(ErrorKind::invalid_argument, "Laguerre degree must be >= 0");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void laguerre_all(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = 1.0 - x;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    out[k + 1] = ((2.0 * k + 1.0 - x) * out[k] - k * out[k - 1]) / (k + 1.0);
  }
}

}  // namespace tomostat
