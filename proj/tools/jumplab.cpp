// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "jumplab/cli.hpp"

int main(int argc, char** argv) { return jumplab::run_cli(argc, argv, std::cerr); }
