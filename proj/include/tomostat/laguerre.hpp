// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

namespace tomostat {

/// L_n(x) by the three-term recurrence
///   (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}.
double laguerre(int n, double x);

/// Fills out[0..n_max] with L_0(x)..L_{n_max}(x); out.size() must be n_max+1.
void laguerre_all(double x, std::span<double> out);

}  // namespace tomostat
