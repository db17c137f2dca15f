// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "biotrunc/cli.hpp"

int main(int argc, char** argv) { return biotrunc::cli::run(argc, argv, std::cout, std::cerr); }
