// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include "tomostat/parallel.hpp"

#include <cstdlib>
#include <string>

namespace tomostat {

int thread_count() {
  if (const char* env = std::getenv("TOMOSTAT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace tomostat
