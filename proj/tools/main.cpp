// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return tomostat::cli::run(argc, argv, std::cout, std::cerr); }
