// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jumplab/coefficient.hpp"
#include "jumplab/kernels.hpp"

namespace jumplab {

enum class Verdict { pass, advisory, fail };

std::string verdict_name(Verdict v);

/// State points plus the radii used for modulus-of-continuity probes.
struct StateGrid {
    int d = 1;
    std::vector<Vec> points;
    std::vector<double> pair_radii;  // strictly decreasing toward 0

    /// Tensor grid with `n` points per axis on [lo, hi]^d.
    static StateGrid uniform(int d, double lo, double hi, int n);
    /// 201 points on [-10, 10] for d = 1, 41^d points on [-5, 5]^d otherwise;
    /// radii 2^-k, k = 1..12.
    static StateGrid defaults(int d);

    /// Throws DomainError when empty or the radii are not strictly decreasing.
    void validate() const;
};

struct CheckResult {
    std::string name;
    std::string assumption;  // the condition this check maps to
    Verdict verdict = Verdict::pass;
    std::vector<std::pair<std::string, double>> evidence;
    std::vector<std::pair<std::string, Verdict>> parts;  // sub-conditions
    std::optional<Vec> witness;
    double witness_value = 0.0;
    std::string message;

    void add(std::string key, double value) { evidence.emplace_back(std::move(key), value); }
    std::optional<double> find(const std::string& key) const;
};

struct ValidationReport {
    std::string kernel_id;
    int d = 1;
    std::size_t grid_points = 0;
    std::vector<CheckResult> checks;

    // Per-grid-point evidence: x coordinates followed by these columns.
    std::vector<std::string> point_columns;
    std::vector<std::vector<double>> point_rows;

    bool any_fail() const;
    const CheckResult* find(const std::string& name) const;
    std::string to_text() const;
    std::string to_csv() const;
};

struct EllipticityBounds {
    double lambda = 0.0;  // min eigenvalue of a(x) over the grid
    double Lambda = 0.0;  // max eigenvalue
};

struct ValidatorOptions {
    double drift_tolerance = 1e-7;
    double eigenvalue_tolerance = 1e-9;
    std::vector<double> epsilons = {1.0, 0.5, 0.1, 0.01};
};

CheckResult check_second_moment(const KernelSpec& kernel, const StateGrid& grid);

CheckResult check_zero_drift(const KernelSpec& kernel, const StateGrid& grid, const std::vector<double>& epsilons,
                             double tolerance = 1e-7);

/// Pointwise nu1 <= N(x, .) <= nu2 on grid x z_samples, plus positivity of the
/// lower envelope's coordinate second moments and finiteness of the upper
/// envelope's second moment. Empty z_samples selects a default set.
CheckResult check_envelopes(const KernelSpec& kernel, const EnvelopePair& envelopes, const StateGrid& grid,
                            const std::vector<Vec>& z_samples = {});

CheckResult check_ellipticity(const KernelSpec& kernel, const StateGrid& grid, double tolerance = 1e-9,
                              EllipticityBounds* bounds = nullptr);

/// Range (0, 2) of the index and its modulus of continuity on pair_radii.
CheckResult check_index_regularity(const CoefficientFn& alpha, const StateGrid& grid);

/// Envelope, continuity and zero-mean conditions of the big-jump component
/// at `component` (possibly cone restricted).
CheckResult check_big_jump_conditions(const KernelSpec& kernel, std::size_t component, const StateGrid& grid);

/// Integrability of r^{1 - alpha(r)}, the Levy-type and antisymmetric-part
/// bounds, and the L^inf tail-mass bound for a Hunt component.
CheckResult check_hunt_conditions(const KernelSpec& kernel, std::size_t component, const StateGrid& grid);

/// Samples directions and checks the declared symmetry flags of a cone.
CheckResult check_cone_symmetry(const Cone& cone, int d, int samples = 4096);

/// Coefficients must be non-negative (strictly positive for c and alpha) and
/// stay within any declared bounds.
CheckResult check_coefficients(const KernelSpec& kernel, const StateGrid& grid);

/// modulus(r): sup over grid points x and axis offsets of |f(x) - f(x +- r e_i)|.
std::vector<double> modulus_of_continuity(const CoefficientFn& f, const StateGrid& grid);

/// Every applicable check. Ellipticity bounds are stored when requested.
ValidationReport validate_all(const KernelSpec& kernel, const StateGrid& grid, const ValidatorOptions& options = {},
                              const std::optional<EnvelopePair>& envelopes = std::nullopt,
                              EllipticityBounds* bounds = nullptr);

}  // namespace jumplab
