// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "jumplab/kernels.hpp"

namespace fx {

using namespace jumplab;

inline CoefficientFn k(double v) { return CoefficientFn::constant(v); }

inline StableLikeSmall stable(double c, double alpha) { return {k(c), k(alpha), false}; }
inline BigJumpPowerLaw power(double c0, double beta) { return {k(c0), k(beta)}; }

inline KernelSpec atoms_pm(double a, double w = 1.0)
{
    return KernelSpec(1, {CompoundPoissonAtoms{{Atom{w, Vec{a}}, Atom{w, Vec{-a}}}}}, "atoms");
}

/// Isotropic stable-like + power law in d = 1, the closed-form corpus kernel.
inline KernelSpec stable_plus_power()
{
    return KernelSpec(1, {stable(1.0, 1.0), power(1.0, 3.0)}, "stable+power");
}

/// Density z^{-4} on z >= 1 only (d = 1).
inline KernelSpec one_sided()
{
    Cone right{expr::parse("x[0]"), false, false};
    return KernelSpec(1, {ConeRestriction{BigJumpPowerLaw{k(1.0), k(3.0)}, right}}, "one-sided");
}

/// d = 2 kernel supported on the e1 axis.
inline KernelSpec axis_d2()
{
    return KernelSpec(2, {CompoundPoissonAtoms{{Atom{1.0, Vec{0.5, 0.0}}, Atom{1.0, Vec{-0.5, 0.0}}}}}, "axis");
}

inline KernelSpec null_kernel(int d = 1) { return KernelSpec(d, {}, "null"); }

/// State-dependent stable-like family with c in [1, 2], alpha in [1, 1.5] and a
/// power-law big-jump part with beta1 in [3, 3.5].
inline KernelSpec index_family(int d = 1)
{
    StableLikeSmall s{CoefficientFn::decaying_bump(1.0, 1.0), CoefficientFn::decaying_bump(1.0, 0.5), false};
    BigJumpPowerLaw b{CoefficientFn::decaying_bump(1.0, 1.0), CoefficientFn::decaying_bump(3.0, 0.5)};
    return KernelSpec(d, {s, b}, "index-family");
}

}  // namespace fx
