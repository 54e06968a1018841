// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "jumplab/config.hpp"
#include "jumplab/simulator.hpp"

namespace jumplab {

inline constexpr const char* kToolVersion = "jumplab 1.0.0";

enum ExitCode : int { kExitOk = 0, kExitFail = 1, kExitUsage = 2 };

struct RunOptions {
    bool force = false;
    unsigned jobs = 1;
    std::string out_root;  // empty: config, then JUMPLAB_OUT, then "out"
    std::optional<std::uint64_t> seed_override;
    std::ostream* log = nullptr;
};

/// <root>/<16 hex digits of the config hash>.
std::string run_directory(const ExperimentConfig& config, const RunOptions& options);

int cmd_validate(const std::string& config_path, const RunOptions& options);
int cmd_simulate(const std::string& config_path, const RunOptions& options);
int cmd_analyze(const std::string& config_path, const RunOptions& options);

/// Ensemble as written by simulate: one row per path, one row per jump.
struct EnsembleFiles {
    std::string paths;
    std::string jumps;
};
EnsembleFiles ensemble_to_csv(const PathEnsemble& ensemble, const Vec& x0);
/// Inverse of ensemble_to_csv; ConfigError on malformed input.
PathEnsemble ensemble_from_csv(const EnsembleFiles& files);

}  // namespace jumplab
