// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "jumplab/kernels.hpp"
#include "jumplab/simulator.hpp"
#include "jumplab/stats.hpp"
#include "jumplab/test_functions.hpp"

namespace jumplab {

/// a(x) as seen by the simulated process: the full matrix, or with the
/// |z| < eps part removed when the ensemble dropped small jumps. Caches the
/// value for state-independent kernels.
class SecondMomentField {
public:
    SecondMomentField(const KernelSpec& kernel, double truncation_eps);

    /// truncation_eps for a drop-mode config, 0 otherwise.
    static double truncation_for(const SimConfig& config);

    Matrix3 at(const Vec& x) const;
    Matrix3 full_at(const Vec& x) const;
    bool state_free() const noexcept { return fixed_; }

private:
    const KernelSpec& kernel_;
    double eps_;
    bool fixed_ = false;
    Matrix3 fixed_tail_{};
    Matrix3 fixed_full_{};
};

/// int_0^t g(X_s) ds along the piecewise-constant path.
template <class G>
double integrate_along(const Path& path, double t, G&& g)
{
    Vec x = path.x0;
    double last = 0.0, acc = 0.0;
    for (std::size_t k = 0; k < path.jump_times.size() && path.jump_times[k] <= t; ++k) {
        acc += g(x) * (path.jump_times[k] - last);
        last = path.jump_times[k];
        x += path.jump_vectors[k];
    }
    return acc + g(x) * (t - last);
}

struct MartingaleReport {
    double t = 0.0;
    std::size_t n_paths = 0;
    std::vector<MeanEstimate> coordinates;  // X_t^(i) - x0^(i)
    bool pass = false;
};

/// Per-coordinate mean of X_t - x0; pass iff every |z-score| <= 3.
MartingaleReport martingale_test(const PathEnsemble& ensemble, double t);

struct MomentIdentityReport {
    double t = 0.0;
    std::vector<double> lhs;                // mean of (X_t^(i) - x0^(i))^2
    std::vector<double> rhs;                // mean of int_0^t a_ii(X_s) ds, truncated as simulated
    std::vector<double> rhs_full;           // same with the untruncated a
    std::vector<MeanEstimate> difference;   // per-path lhs - rhs
    std::vector<double> relative_difference;
    double mean_dropped_variance_fraction = 0.0;
    bool pass = false;
};

MomentIdentityReport second_moment_identity(const PathEnsemble& ensemble, const KernelSpec& kernel, double t,
                                            unsigned jobs = 1);

struct QVReport {
    double t = 0.0;
    int d = 1;
    /// Row-major d x d; entry (i, j) is the ensemble mean of [X]^{ij}_t - <X^i, X^j>_t.
    std::vector<MeanEstimate> difference;
    std::vector<double> realized_mean;
    std::vector<double> predictable_mean;
    /// Per path, entry (0, 0) of each form (for the scatter plot).
    std::vector<double> realized_00;
    std::vector<double> predictable_00;
    bool pass = false;
};

QVReport qv_comparison(const PathEnsemble& ensemble, const KernelSpec& kernel, double t, unsigned jobs = 1);

/// Realized [X]_t (row-major d x d) of one path.
std::vector<double> realized_qv(const Path& path, double t);
/// Predictable <X>_t of one path for the given field.
std::vector<double> predictable_qv(const Path& path, double t, const SecondMomentField& field);

/// Lu(x) = int_{|z| >= eps} [u(x+z) - u(x) - <grad u(x), z> 1_{|z|<1}] N(x,dz).
/// eps = 0 gives the full generator. Atoms are summed exactly.
double apply_generator(const KernelSpec& kernel, const TestFunction& u, const Vec& x, double eps = 0.0);

struct GeneratorReport {
    double t = 0.0;
    std::string function;
    MeanEstimate martingale;  // u(X_t) - u(x0) - int_0^t Lu(X_s) ds
    bool pass = false;
};

GeneratorReport generator_martingale_test(const PathEnsemble& ensemble, const KernelSpec& kernel,
                                          const TestFunction& u, double t, unsigned jobs = 1);

/// Band calibration: the band is [kappa_lo sqrt(lambda), kappa_hi sqrt(Lambda)].
struct LILBand {
    double kappa_lo = 0.0;
    double kappa_hi = 0.0;
};

struct LILOptions {
    Vec direction;                    // unit vector r
    std::vector<double> checkpoints;  // increasing, all >= e^e
    LILBand band;
    double lambda_hat = 0.0;
    double Lambda_hat = 0.0;
    double tail_moment_floor = 0.0;   // max_i inf_x int (z^(i))^2 N(x,dz)
    double required_coverage = 0.9;
    bool keep_trajectories = true;
};

/// Dyadic checkpoints e^e * 2^k up to t_end.
std::vector<double> dyadic_checkpoints(double t_end);

struct LILReport {
    std::vector<double> checkpoints;
    double band_lo = 0.0;
    double band_hi = 0.0;
    double lambda_hat = 0.0;
    double Lambda_hat = 0.0;
    double tail_moment_floor = 0.0;
    double tail_moment_floor_sqrt = 0.0;
    std::size_t n_paths = 0;
    std::size_t degenerate_paths = 0;   // <X^r> too small for loglog at some checkpoint
    std::vector<double> max_abs_w;      // per path, over all checkpoints
    std::vector<double> max_r;
    // Per path, per checkpoint (row-major) when trajectories are kept.
    std::vector<double> w;
    std::vector<double> r;
    double coverage = 0.0;              // fraction of paths with max |W| in the band
    double max_abs_w_median = 0.0;
    double max_r_median = 0.0;
    double max_r_q05 = 0.0;
    double max_r_q95 = 0.0;
    bool pass = false;
};

/// LIL statistics from stored paths.
LILReport lil_statistics(const PathEnsemble& ensemble, const KernelSpec& kernel, const LILOptions& options,
                         unsigned jobs = 1);

/// Same statistics generated path by path from the simulator, without storing
/// paths (long horizons).
LILReport lil_statistics_streaming(const Simulator& simulator, std::size_t n_paths, const LILOptions& options,
                                   unsigned jobs = 1);

/// Min / max eigenvalues of the truncated a over the grid and the tail floor.
struct LILConstants {
    double lambda_hat = 0.0;
    double Lambda_hat = 0.0;
    double tail_moment_floor = 0.0;
};
LILConstants lil_constants(const KernelSpec& kernel, const StateGrid& grid, double truncation_eps);

}  // namespace jumplab
