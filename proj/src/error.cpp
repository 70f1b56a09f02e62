// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include "tomostat/error.hpp"

namespace tomostat {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::invalid_transmissivity: return "invalid_transmissivity";
    case ErrorKind::invalid_efficiency: return "invalid_efficiency";
    case ErrorKind::invalid_state: return "invalid_state";
    case ErrorKind::quadrature_nonconvergence: return "quadrature_nonconvergence";
    case ErrorKind::divergent_kernel: return "divergent_kernel";
    case ErrorKind::nonintegrable_operator: return "nonintegrable_operator";
    case ErrorKind::insufficient_range: return "insufficient_range";
    case ErrorKind::insufficient_samples: return "insufficient_samples";
    case ErrorKind::length_mismatch: return "length_mismatch";
    case ErrorKind::invalid_config: return "invalid_config";
    case ErrorKind::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace tomostat
