// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jumplab/kernels.hpp"
#include "jumplab/simulator.hpp"
#include "jumplab/validators.hpp"

namespace jumplab {

struct GridSpec {
    double lo = -10.0;
    double hi = 10.0;
    int n = 0;                        // 0: the per-dimension default
    std::vector<double> pair_radii;   // empty: 2^-k, k = 1..12
};

struct AnalysisSpec {
    std::string kind;  // martingale, moment_identity, qv, generator, lil
    std::size_t line = 0;
    std::vector<double> times;
    std::vector<std::string> functions;
    // lil only
    Vec direction;
    double t_end = 0.0;
    std::size_t n_paths = 0;
    double kappa_lo = 0.0;
    double kappa_hi = 0.0;
    std::string band_file;  // relative to the config file
    double required_coverage = 0.9;
    std::optional<std::uint64_t> seed;
    std::size_t plot_paths = 20;
};

struct OutputSpec {
    std::string dir;  // empty: --out, then JUMPLAB_OUT, then "out"
    bool csv = true;
    bool svg = true;
};

struct ExperimentConfig {
    std::string source;     // config text as read
    std::string base_dir;   // directory holding the config file
    int d = 1;
    std::string kernel_id;
    KernelSpec kernel;
    std::optional<EnvelopePair> envelopes;
    GridSpec grid_spec;
    StateGrid grid;
    ValidatorOptions validator;
    SimConfig sim;
    bool epsilon_auto = false;
    double epsilon_target = 0.01;
    Vec x0;
    std::size_t n_paths = 0;
    std::size_t path_files = 10;
    bool inline_simulation = false;
    std::vector<AnalysisSpec> analyses;
    OutputSpec output;
};

/// Parses the experiment format. Throws ConfigError carrying the 1-based line.
ExperimentConfig parse_config(std::string_view text, std::string base_dir = ".");

/// Reads and parses a file; ConfigError with line 0 when it cannot be read.
ExperimentConfig load_config(const std::string& path);

/// FNV-1a 64 of the bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace jumplab
