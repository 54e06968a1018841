// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace jumplab {

/// Entry point of the jumplab tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& log);

}  // namespace jumplab
