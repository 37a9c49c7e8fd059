// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "hamfactor/cli.hpp"

int main(int argc, char** argv) {
  return hamfactor::run_cli(argc, argv, std::cout, std::cerr);
}
