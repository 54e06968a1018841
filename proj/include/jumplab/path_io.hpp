// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "jumplab/simulator.hpp"

namespace jumplab {

/// One path as CSV: '#'-prefixed metadata lines (d, x0, seed, epsilon, mode,
/// t_end, path index, dropped variance fraction, approximate), then the header
/// `jump_time,z1,..,zd` and one row per jump. Floats use the shortest
/// round-trip form; lines end in LF.
std::string path_to_csv(const Path& path, const SimConfig& config, std::size_t path_index);

/// Inverse of path_to_csv. Throws ConfigError (line-anchored) on malformed input.
Path path_from_csv(std::string_view text);

std::string mode_name(SmallJumpMode mode);

}  // namespace jumplab
