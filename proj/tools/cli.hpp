// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Commands are plain functions over a validated
// RunConfig so they can be driven from tests without a process boundary.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tomostat/estimators.hpp"

namespace tomostat::cli {

struct RunConfig {
  // [state]
  double vx = 0.5;
  double vp = 2.0;
  double cxp = 0.0;
  double mean_re = 0.0;
  double mean_im = 0.0;
  // [filter]
  double width = 1.8;
  // [alpha] point for single-point commands
  double alpha_re = 0.6;
  double alpha_im = 0.0;
  // [grid]
  double grid_min = -3.0;
  double grid_max = 3.0;
  double grid_step = 0.05;
  std::string axis = "real";
  // [run]
  long long n = 100000;
  std::uint64_t seed = 1;
  double eta = 1.0;
  int n_max = 20;
  std::string scheme = "balanced";
  double t = 1.0;
  double mix_re = 0.0;
  double mix_im = 0.0;
  double table_dx = 0.01;
  // [io]
  std::string input;
  std::string output;
  std::string dir = "tomostat-example";

  /// Throws Error(invalid_config) naming the offending key.
  void validate() const;
  GaussianState state() const;
  Complex alpha() const { return {alpha_re, alpha_im}; }
  std::vector<Complex> grid() const;
};

void cmd_simulate(const RunConfig& cfg, std::ostream& out);
void cmd_estimate(const RunConfig& cfg, std::ostream& out);
void cmd_theory(const RunConfig& cfg, std::ostream& out);
void cmd_compare(const RunConfig& cfg, std::ostream& out);
void cmd_reproduce_example(const RunConfig& cfg, std::ostream& out);

/// Chi-square p-value for uniformity of the recorded phases over `bins` bins.
double phase_uniformity_pvalue(const QuadratureSampleSet& set, int bins = 20);

/// Exit codes: 0 success, 2 invalid config, 3 numerical failure, 4 I/O.
int exit_code(ErrorKind kind);

/// Full argument parsing and dispatch; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tomostat::cli
