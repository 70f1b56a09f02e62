// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

// Counter-based random numbers (Philox4x32-10). A draw is a pure function of
// (seed, counter), so sample j of a run does not depend on how the run was
// split across threads.

#pragma once

#include <array>
#include <cstdint>

namespace tomostat {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds, bit-compatible with Random123.
PhiloxBlock philox4x32(PhiloxBlock counter, PhiloxKey key);

/// Stream of uniform doubles addressed by (seed, index, lane).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  /// Two uniforms in [0, 1) with 53-bit resolution from one Philox block
  /// with counter (index_lo, index_hi, lane, 0).
  std::array<double, 2> uniform_pair(std::uint64_t index, std::uint32_t lane) const noexcept;

 private:
  PhiloxKey key_;
};

}  // namespace tomostat
