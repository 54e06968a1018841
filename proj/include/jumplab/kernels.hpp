// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "jumplab/coefficient.hpp"
#include "jumplab/exprlang.hpp"
#include "jumplab/vec.hpp"

namespace jumplab {

/// Density c(x) / |z|^{d + alpha(x)} on 0 < |z| < 1, optionally times the
/// Bass constant C_{alpha(x)}.
struct StableLikeSmall {
    CoefficientFn c;
    CoefficientFn alpha;
    bool bass_normalized = false;
};

/// Density c0(x) / |z|^{d + beta1(x)} on |z| >= 1.
struct BigJumpPowerLaw {
    CoefficientFn c0;
    CoefficientFn beta1;
};

/// Density c0(x) exp(-lambda |z|^{beta2(x)}) on |z| >= 1.
struct BigJumpStretchedExp {
    CoefficientFn c0;
    double lambda = 1.0;
    CoefficientFn beta2;
};

struct Atom {
    double weight = 0.0;
    Vec z;
};

/// Finite atomic measure sum_k w_k delta_{z_k}.
struct CompoundPoissonAtoms {
    std::vector<Atom> atoms;
};

/// Difference kernel J(x, y) = c(x) / |x - y|^{d + alpha(|x - y|)}, seen from
/// x as N(x, dz) = J(x, x + z) dz. `alpha_r` is a radial expression in r.
struct HuntDifference {
    CoefficientFn c;
    CoefficientFn alpha_r;
};

/// Cone of directions {theta : predicate(theta) > 0}. The symmetry flags are
/// declarations; validators audit them by sampling.
struct Cone {
    expr::Expr predicate;
    bool symmetric = false;              // A = -A
    bool permutation_symmetric = false;  // closed under coordinate permutations

    bool contains(const Vec& direction) const { return predicate.eval(direction) > 0.0; }
};

using RadialComponent = std::variant<StableLikeSmall, BigJumpPowerLaw, BigJumpStretchedExp, HuntDifference>;

/// Radial component with density multiplied by 1_{z / |z| in cone}.
struct ConeRestriction {
    RadialComponent base;
    Cone cone;
};

using KernelComponent =
    std::variant<StableLikeSmall, BigJumpPowerLaw, BigJumpStretchedExp, CompoundPoissonAtoms, ConeRestriction, HuntDifference>;

std::string component_name(const KernelComponent& c);

/// State-free geometry of one component: angular moments of the direction
/// set, symmetry, and (for Hunt components) cached radial integrals.
struct ComponentGeometry {
    double angular_mass = 0.0;                         // int_S 1_A
    std::array<double, kMaxDim> angular_first{};       // int_S theta 1_A
    std::array<std::array<double, kMaxDim>, kMaxDim> angular_second{};  // int_S theta theta^T 1_A
    double angular_error = 0.0;
    bool isotropic = false;
    bool odd_symmetric = false;
    bool state_free = false;
    // Hunt radial part: int_0^inf r^{1 - alpha(r)} dr (or why it diverges).
    std::optional<double> hunt_second_radial;
    double hunt_second_radial_error = 0.0;
    std::string hunt_divergence;
    double hunt_alpha_origin = 0.0;
    double hunt_alpha_infinity = 0.0;
};

/// Jumping kernel N(x, dz) in dimension 1..3: a sum of components.
/// Immutable; safe to share across threads.
class KernelSpec {
public:
    KernelSpec() : KernelSpec(1, {}) {}
    KernelSpec(int d, std::vector<KernelComponent> components, std::string id = {});

    int dim() const noexcept { return d_; }
    const std::vector<KernelComponent>& components() const noexcept { return components_; }
    const ComponentGeometry& geometry(std::size_t i) const { return geometry_.at(i); }
    const std::string& id() const noexcept { return id_; }

    bool empty() const noexcept { return components_.empty(); }
    bool has_atoms() const noexcept;
    bool has_density() const noexcept;
    /// Every component declares or has odd symmetry N(x, -dz) = N(x, dz).
    bool odd_symmetric() const noexcept;
    /// No coefficient depends on the state.
    bool state_independent() const noexcept;

private:
    int d_ = 1;
    std::vector<KernelComponent> components_;
    std::vector<ComponentGeometry> geometry_;
    std::string id_;
};

/// State-free lower and upper envelopes nu1 <= N(x, .) <= nu2. A null nu1 is
/// an empty KernelSpec.
struct EnvelopePair {
    KernelSpec nu1;
    KernelSpec nu2;

    EnvelopePair(KernelSpec lower, KernelSpec upper);
};

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

struct VecEstimate {
    Vec value;
    double error = 0.0;
};

using Matrix3 = std::array<std::array<double, kMaxDim>, kMaxDim>;

/// a_ij(x) = int z^(i) z^(j) N(x, dz).
struct DiffusionMatrix {
    Vec x;
    int d = 1;
    Matrix3 a{};
    double quadrature_error = 0.0;

    double trace() const noexcept;
    /// r^T a r.
    double quadratic_form(const Vec& r) const noexcept;
};

struct BassConstant {
    double alpha = 0.0;
    int d = 1;
    double value = 0.0;
};

struct HuntParts {
    double j = 0.0;   // J(x, y)
    double js = 0.0;  // (J(x,y) + J(y,x)) / 2
    double ja = 0.0;  // (J(x,y) - J(y,x)) / 2
};

/// Sum of component densities at (x, z). Throws AtomicKernelError when the
/// kernel has atoms.
double density(const KernelSpec& kernel, const Vec& x, const Vec& z);

/// int |z|^2 N(x, dz). Throws DivergentIntegral.
Estimate second_moment(const KernelSpec& kernel, const Vec& x);

/// int_{|z| >= eps} z N(x, dz); exactly zero without evaluation when the
/// kernel is odd symmetric.
VecEstimate drift_tail(const KernelSpec& kernel, const Vec& x, double eps);

DiffusionMatrix diffusion_matrix(const KernelSpec& kernel, const Vec& x);

/// int_{|z| < eps} z z^T N(x, dz): the part of a(x) removed by eps-truncation.
DiffusionMatrix small_jump_matrix(const KernelSpec& kernel, const Vec& x, double eps);

/// N(x, {|z| >= eps}).
Estimate total_mass_tail(const KernelSpec& kernel, const Vec& x, double eps);

/// C_alpha = alpha 2^{alpha-1} Gamma((alpha+d)/2) / (pi^{d/2} Gamma(1 - alpha/2)).
BassConstant bass_constant(double alpha, int d);

HuntParts hunt_decompose(const HuntDifference& kernel, const Vec& x, const Vec& y);

/// J(x, y) for a Hunt difference kernel.
double hunt_density(const HuntDifference& kernel, const Vec& x, const Vec& y);

/// Pushforward z -> factor * z of an atomic kernel.
KernelSpec scale_atoms(const KernelSpec& kernel, double factor);

/// Radial moment int_a^b r^{d-1+k} rho(x, r) dr of one radial component,
/// where rho is its density as a function of |z| (before any cone factor).
/// Closed form for stable-like and power-law parts, incomplete gamma for the
/// stretched exponential, quadrature for Hunt kernels.
Estimate radial_moment(const RadialComponent& component, const ComponentGeometry& geometry, int d, const Vec& x,
                       int k, double a, double b);

/// Radial density rho(x, r) of one radial component (zero outside support).
double radial_density(const RadialComponent& component, int d, const Vec& x, double r);

}  // namespace jumplab
