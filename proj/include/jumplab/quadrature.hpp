// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include "jumplab/vec.hpp"

/// Radial x spherical quadrature for kernel integrals over R^d \ {0}.
///
/// Radial integrals run through a global adaptive 15-point Gauss-Kronrod
/// scheme. A power singularity r^p at the origin is regularised with
/// r = b * exp(-s / (p + 1)) followed by s = t / (1 - t); an infinite upper
/// limit is folded onto the origin with r = 1/u first. The declared exponent
/// sets the scale of the substitution; when it is unknown (NaN) a growth
/// heuristic watches for divergence instead.
namespace jumplab::quad {

struct QuadratureResult {
    double value = 0.0;
    double error_bound = 0.0;
    std::size_t evaluations = 0;

    QuadratureResult& operator+=(const QuadratureResult& o) noexcept
    {
        value += o.value;
        error_bound += o.error_bound;
        evaluations += o.evaluations;
        return *this;
    }
};

struct Options {
    double rel_tol = 1e-8;
    double abs_tol = 1e-300;
    std::size_t max_evaluations = 1'000'000;
    /// The estimate must grow by more than this factor across
    /// `divergence_levels` consecutive refinement levels to be declared divergent.
    double divergence_ratio = 10.0;
    int divergence_levels = 4;
};

using RadialFn = std::function<double(double)>;
using DirectionFn = std::function<double(const Vec&)>;

inline constexpr double kUnknownExponent = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Adaptive Gauss-Kronrod on a finite interval [a, b].
QuadratureResult integrate_interval(const RadialFn& f, double a, double b, const Options& opts = {});

/// Integral of f over (r_lo, r_hi), r_hi possibly infinite.
///
/// `singular_exponent` p asserts f(r) ~ r^p as r -> 0 (used only when
/// r_lo == 0); `tail_exponent` q asserts f(r) ~ r^q as r -> infinity. p <= -1
/// or q >= -1 raise DivergentIntegral immediately; NaN leaves the decision to
/// the growth heuristic. Throws ToleranceNotMet at the evaluation cap.
QuadratureResult integrate_radial(const RadialFn& f, double r_lo, double r_hi, double singular_exponent,
                                  const Options& opts = {}, double tail_exponent = kUnknownExponent);

/// Surface measure of the unit sphere S^{d-1}: 2, 2 pi, 4 pi.
double sphere_area(int d);

/// Default resolution of integrate_sphere: trapezoid points for d = 2,
/// Gauss-Legendre polar nodes for d = 3.
int default_sphere_resolution(int d);

/// Integral over S^{d-1}. d = 1 sums the two points +-1, d = 2 is the
/// trapezoid rule with `resolution` points, d = 3 a Gauss-Legendre (polar)
/// x trapezoid (azimuth, 2 * resolution points) product rule. The error bound
/// compares against the rule at half resolution.
QuadratureResult integrate_sphere(const DirectionFn& g, int d, int resolution = 0);

/// Integral of F over the shell {r_lo < |z| < r_hi} in R^d as a radial
/// integral of spherical averages. Exponents refer to r^{d-1} * int_S F(r theta).
QuadratureResult integrate_shell(const DirectionFn& F, int d, double r_lo, double r_hi, double singular_exponent,
                                 double tail_exponent, const Options& opts = {}, int sphere_resolution = 0);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, double* nodes, double* weights);

}  // namespace jumplab::quad
