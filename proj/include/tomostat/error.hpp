// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tomostat {

enum class ErrorKind {
  invalid_argument,
  invalid_transmissivity,
  invalid_efficiency,
  invalid_state,
  quadrature_nonconvergence,
  divergent_kernel,
  nonintegrable_operator,
  insufficient_range,
  insufficient_samples,
  length_mismatch,
  invalid_config,
  io_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tomostat
