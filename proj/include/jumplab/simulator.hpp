// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "jumplab/kernels.hpp"
#include "jumplab/validators.hpp"

namespace jumplab {

enum class SmallJumpMode { drop, gaussian_substitute };

struct SimConfig {
    double t_end = 1.0;
    double epsilon = 0.01;
    double dominating_rate_margin = 1.5;
    std::uint64_t base_seed = 0;
    std::size_t max_jumps = 10'000'000;
    SmallJumpMode small_jump_mode = SmallJumpMode::drop;

    /// Throws DomainError on t_end <= 0, epsilon outside (0, 1), margin < 1,
    /// or max_jumps == 0.
    void validate() const;
};

struct TruncationReport {
    /// Time average along the path of tr(small-jump matrix) / tr(a).
    double dropped_variance_fraction = 0.0;
};

/// Piecewise-constant path x0 + sum of jumps up to t. In Gaussian-substitute
/// mode the records also carry the Gaussian increments and `approximate` is set.
struct Path {
    Vec x0;
    double t_end = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> jump_times;
    std::vector<Vec> jump_vectors;
    TruncationReport truncation;
    bool approximate = false;

    Vec final_state() const;
};

/// Right-continuous state at time t in [0, t_end]; RangeError otherwise.
Vec state_at(const Path& path, double t);

struct PathEnsemble {
    SimConfig config;
    std::string kernel_id;
    std::vector<Path> paths;
    std::vector<std::uint64_t> seeds;
};

/// Receives each jump record as it is generated.
using JumpSink = std::function<void(double time, const Vec& z)>;

/// Thinning simulator for one kernel. The dominating rate is fixed at
/// construction: margin times the sup of N(x, {|z| >= eps}) over the grid
/// and x0 (a single evaluation for state-independent kernels).
class Simulator {
public:
    Simulator(KernelSpec kernel, SimConfig config, const StateGrid& grid, const Vec& x0);
    Simulator(KernelSpec kernel, SimConfig config, const Vec& x0);
    ~Simulator();
    Simulator(Simulator&&) noexcept;

    const KernelSpec& kernel() const noexcept { return kernel_; }
    const SimConfig& config() const noexcept { return config_; }
    const Vec& x0() const noexcept { return x0_; }
    double dominating_rate() const noexcept { return rate_bound_; }
    std::uint64_t path_seed(std::size_t index) const noexcept;

    /// N(x, {|z| >= eps}) as used by the thinning step.
    double jump_rate(const Vec& x) const;

    Path simulate_path(std::size_t index) const;

    /// Generates path `index` without storing it; returns the truncation
    /// report and the final state. Emits the same records simulate_path stores.
    TruncationReport stream_path(std::size_t index, const JumpSink& sink, Vec* final_state = nullptr) const;

    /// Paths 0..n-1 on `jobs` worker threads; identical for any job count.
    PathEnsemble simulate_ensemble(std::size_t n_paths, unsigned jobs = 1) const;

private:
    struct Plan;
    KernelSpec kernel_;
    SimConfig config_;
    Vec x0_;
    double rate_bound_ = 0.0;
    std::unique_ptr<Plan> plan_;

    void init(const std::vector<Vec>& probe_points);
};

/// One-shot form: builds a Simulator over the default grid.
Path simulate_path(const KernelSpec& kernel, const Vec& x0, const SimConfig& config, std::size_t path_index);
PathEnsemble simulate_ensemble(const KernelSpec& kernel, const Vec& x0, const SimConfig& config, std::size_t n_paths,
                               unsigned jobs = 1);

/// Largest eps in {2^-k} (k = 1..30) whose dropped variance fraction is at
/// most `target` at every grid point. Needs a finite second moment.
double auto_epsilon(const KernelSpec& kernel, const StateGrid& grid, double target = 0.01);

}  // namespace jumplab
