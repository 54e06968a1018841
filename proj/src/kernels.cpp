// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "jumplab/error.hpp"
#include "jumplab/quadrature.hpp"

namespace jumplab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int kConeResolution2d = 4096;
constexpr int kConeResolution3d = 96;

void require_dim(const KernelSpec& kernel, const Vec& x)
{
    if (x.dim() != kernel.dim()) {
        throw DomainError("state has dimension " + std::to_string(x.dim()) + ", kernel has " +
                          std::to_string(kernel.dim()));
    }
}

void check_coordinates(const CoefficientFn& f, int d, const char* name)
{
    if (f.expr().max_coordinate() >= d) {
        throw IndexError(std::string(name) + " references x[" + std::to_string(f.expr().max_coordinate()) +
                         "] but the kernel dimension is " + std::to_string(d));
    }
}

void check_radial(const RadialComponent& rc, int d)
{
    std::visit(overloaded{
                   [&](const StableLikeSmall& s) {
                       check_coordinates(s.c, d, "c");
                       check_coordinates(s.alpha, d, "alpha");
                   },
                   [&](const BigJumpPowerLaw& p) {
                       check_coordinates(p.c0, d, "c0");
                       check_coordinates(p.beta1, d, "beta1");
                   },
                   [&](const BigJumpStretchedExp& s) {
                       check_coordinates(s.c0, d, "c0");
                       check_coordinates(s.beta2, d, "beta2");
                       if (!(s.lambda > 0.0)) throw DomainError("stretched exponential needs lambda > 0");
                   },
                   [&](const HuntDifference& h) {
                       check_coordinates(h.c, d, "c");
                       if (h.alpha_r.expr().domain() != expr::Domain::radial) {
                           throw DomainError("Hunt index function must be a radial expression in r");
                       }
                   },
               },
               rc);
}

bool radial_state_free(const RadialComponent& rc)
{
    return std::visit(overloaded{
                          [](const StableLikeSmall& s) { return s.c.state_free() && s.alpha.state_free(); },
                          [](const BigJumpPowerLaw& p) { return p.c0.state_free() && p.beta1.state_free(); },
                          [](const BigJumpStretchedExp& s) { return s.c0.state_free() && s.beta2.state_free(); },
                          [](const HuntDifference& h) { return h.c.state_free(); },
                      },
                      rc);
}

void set_isotropic(ComponentGeometry& g, int d)
{
    const double area = quad::sphere_area(d);
    g.angular_mass = area;
    g.isotropic = true;
    g.odd_symmetric = true;
    for (int i = 0; i < d; ++i) g.angular_second[i][i] = area / d;
}

void set_cone(ComponentGeometry& g, const Cone& cone, int d)
{
    auto indicator = [&](const Vec& th) { return cone.contains(th) ? 1.0 : 0.0; };
    const int res = d == 2 ? kConeResolution2d : kConeResolution3d;
    auto moment = [&](auto&& weight) {
        auto f = [&](const Vec& th) { return indicator(th) * weight(th); };
        return quad::integrate_sphere(f, d, res);
    };
    auto m0 = moment([](const Vec&) { return 1.0; });
    g.angular_mass = m0.value;
    g.angular_error = m0.error_bound;
    for (int i = 0; i < d; ++i) {
        auto m1 = moment([i](const Vec& th) { return th[i]; });
        g.angular_first[i] = m1.value;
        g.angular_error = std::max(g.angular_error, m1.error_bound);
        for (int j = 0; j <= i; ++j) {
            auto m2 = moment([i, j](const Vec& th) { return th[i] * th[j]; });
            g.angular_second[i][j] = g.angular_second[j][i] = m2.value;
            g.angular_error = std::max(g.angular_error, m2.error_bound);
        }
    }
    if (cone.symmetric) {
        g.angular_first.fill(0.0);
        g.odd_symmetric = true;
    }
}

void prepare_hunt(ComponentGeometry& g, const HuntDifference& h)
{
    g.hunt_alpha_origin = h.alpha_r.at_radius(1e-9);
    g.hunt_alpha_infinity = h.alpha_r.at_radius(1e9);
    try {
        auto f = [&](double r) { return std::pow(r, 1.0 - h.alpha_r.at_radius(r)); };
        auto res = quad::integrate_radial(f, 0.0, quad::kInfinity, 1.0 - g.hunt_alpha_origin, {},
                                          1.0 - g.hunt_alpha_infinity);
        g.hunt_second_radial = res.value;
        g.hunt_second_radial_error = res.error_bound;
    } catch (const DivergentIntegral& e) {
        g.hunt_divergence = e.what();
    } catch (const ToleranceNotMet& e) {
        g.hunt_divergence = e.what();
    }
}

bool atoms_symmetric(const CompoundPoissonAtoms& a)
{
    std::vector<bool> used(a.atoms.size(), false);
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
        if (used[i]) continue;
        bool found = false;
        for (std::size_t j = 0; j < a.atoms.size(); ++j) {
            if (j == i || used[j]) continue;
            if (a.atoms[j].weight == a.atoms[i].weight && a.atoms[j].z == -a.atoms[i].z) {
                used[i] = used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

const RadialComponent* as_radial(const KernelComponent& c, RadialComponent& storage)
{
    return std::visit(overloaded{
                          [&](const StableLikeSmall& s) -> const RadialComponent* {
                              storage = s;
                              return &storage;
                          },
                          [&](const BigJumpPowerLaw& s) -> const RadialComponent* {
                              storage = s;
                              return &storage;
                          },
                          [&](const BigJumpStretchedExp& s) -> const RadialComponent* {
                              storage = s;
                              return &storage;
                          },
                          [&](const HuntDifference& s) -> const RadialComponent* {
                              storage = s;
                              return &storage;
                          },
                          [&](const ConeRestriction& s) -> const RadialComponent* { return &s.base; },
                          [&](const CompoundPoissonAtoms&) -> const RadialComponent* { return nullptr; },
                      },
                      c);
}

double stable_factor(const StableLikeSmall& s, int d, const Vec& x, double* alpha_out)
{
    const double alpha = s.alpha(x);
    double k = s.c(x);
    if (s.bass_normalized) k *= bass_constant(alpha, d).value;
    *alpha_out = alpha;
    return k;
}

// int_lo^hi r^e dr in closed form, hi possibly infinite.
double power_integral(double e, double lo, double hi, const char* what)
{
    if (lo == 0.0 && e <= -1.0) throw DivergentIntegral(std::string(what) + ": diverges at the origin");
    if (std::isinf(hi) && e >= -1.0) throw DivergentIntegral(std::string(what) + ": diverges at infinity");
    const double p = e + 1.0;
    if (p == 0.0) return std::log(hi / lo);
    const double top = std::isinf(hi) ? 0.0 : std::pow(hi, p);
    const double bottom = lo == 0.0 ? 0.0 : std::pow(lo, p);
    return (top - bottom) / p;
}

}  // namespace

std::string component_name(const KernelComponent& c)
{
    return std::visit(overloaded{
                          [](const StableLikeSmall&) { return std::string("stable_like_small"); },
                          [](const BigJumpPowerLaw&) { return std::string("big_jump_power_law"); },
                          [](const BigJumpStretchedExp&) { return std::string("big_jump_stretched_exp"); },
                          [](const CompoundPoissonAtoms&) { return std::string("compound_poisson_atoms"); },
                          [](const ConeRestriction&) { return std::string("cone_restriction"); },
                          [](const HuntDifference&) { return std::string("hunt_difference"); },
                      },
                      c);
}

KernelSpec::KernelSpec(int d, std::vector<KernelComponent> components, std::string id)
    : d_(d), components_(std::move(components)), id_(std::move(id))
{
    if (d < 1 || d > kMaxDim) throw DomainError("kernel dimension must be 1, 2 or 3");
    geometry_.resize(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) {
        ComponentGeometry& g = geometry_[i];
        std::visit(overloaded{
                       [&](const CompoundPoissonAtoms& a) {
                           for (const Atom& atom : a.atoms) {
                               if (atom.z.dim() != d) throw DomainError("atom dimension does not match kernel");
                               if (!(atom.weight >= 0.0)) throw DomainError("atom weights must be non-negative");
                               if (atom.z.norm() == 0.0) throw DomainError("atoms must exclude the origin");
                           }
                           g.odd_symmetric = atoms_symmetric(a);
                           g.state_free = true;
                       },
                       [&](const ConeRestriction& c) {
                           check_radial(c.base, d);
                           if (c.cone.predicate.max_coordinate() >= d) {
                               throw IndexError("cone predicate references a coordinate beyond the dimension");
                           }
                           set_cone(g, c.cone, d);
                           g.state_free = radial_state_free(c.base);
                           if (auto* h = std::get_if<HuntDifference>(&c.base)) prepare_hunt(g, *h);
                       },
                       [&](const auto& radial) {
                           RadialComponent rc = radial;
                           check_radial(rc, d);
                           set_isotropic(g, d);
                           g.state_free = radial_state_free(rc);
                           if (auto* h = std::get_if<HuntDifference>(&rc)) prepare_hunt(g, *h);
                       },
                   },
                   components_[i]);
    }
}

bool KernelSpec::has_atoms() const noexcept
{
    for (const auto& c : components_)
        if (std::holds_alternative<CompoundPoissonAtoms>(c)) return true;
    return false;
}

bool KernelSpec::has_density() const noexcept
{
    for (const auto& c : components_)
        if (!std::holds_alternative<CompoundPoissonAtoms>(c)) return true;
    return false;
}

bool KernelSpec::odd_symmetric() const noexcept
{
    for (const auto& g : geometry_)
        if (!g.odd_symmetric) return false;
    return true;
}

bool KernelSpec::state_independent() const noexcept
{
    for (const auto& g : geometry_)
        if (!g.state_free) return false;
    return true;
}

EnvelopePair::EnvelopePair(KernelSpec lower, KernelSpec upper) : nu1(std::move(lower)), nu2(std::move(upper))
{
    if (!nu1.empty() && nu1.dim() != nu2.dim()) throw DomainError("envelope dimensions differ");
    if (!nu1.state_independent() || !nu2.state_independent()) {
        throw DomainError("envelopes must not depend on the state");
    }
}

double DiffusionMatrix::trace() const noexcept
{
    double t = 0.0;
    for (int i = 0; i < d; ++i) t += a[i][i];
    return t;
}

double DiffusionMatrix::quadratic_form(const Vec& r) const noexcept
{
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s += r[i] * a[i][j] * r[j];
    return s;
}

BassConstant bass_constant(double alpha, int d)
{
    if (!(alpha > 0.0 && alpha < 2.0)) {
        std::ostringstream os;
        os << "Bass constant needs 0 < alpha < 2, got " << alpha;
        throw DomainError(os.str());
    }
    const double value = alpha * std::pow(2.0, alpha - 1.0) * std::tgamma((alpha + d) / 2.0) /
                         (std::pow(std::numbers::pi, d / 2.0) * std::tgamma(1.0 - alpha / 2.0));
    return BassConstant{alpha, d, value};
}

double radial_density(const RadialComponent& component, int d, const Vec& x, double r)
{
    return std::visit(overloaded{
                          [&](const StableLikeSmall& s) {
                              if (!(r > 0.0 && r < 1.0)) return 0.0;
                              double alpha;
                              const double k = stable_factor(s, d, x, &alpha);
                              return k * std::pow(r, -(d + alpha));
                          },
                          [&](const BigJumpPowerLaw& p) {
                              if (!(r >= 1.0)) return 0.0;
                              return p.c0(x) * std::pow(r, -(d + p.beta1(x)));
                          },
                          [&](const BigJumpStretchedExp& s) {
                              if (!(r >= 1.0)) return 0.0;
                              return s.c0(x) * std::exp(-s.lambda * std::pow(r, s.beta2(x)));
                          },
                          [&](const HuntDifference& h) {
                              if (!(r > 0.0) || std::isinf(r)) return 0.0;
                              return h.c(x) * std::pow(r, -(d + h.alpha_r.at_radius(r)));
                          },
                      },
                      component);
}

Estimate radial_moment(const RadialComponent& component, const ComponentGeometry& geometry, int d, const Vec& x,
                       int k, double a, double b)
{
    return std::visit(
        overloaded{
            [&](const StableLikeSmall& s) -> Estimate {
                const double lo = std::max(a, 0.0);
                const double hi = std::min(b, 1.0);
                if (!(hi > lo)) return {};
                double alpha;
                const double factor = stable_factor(s, d, x, &alpha);
                // r^{d-1+k} * r^{-d-alpha} = r^{k-1-alpha}
                return {factor * power_integral(k - 1.0 - alpha, lo, hi, "stable-like moment"), 0.0};
            },
            [&](const BigJumpPowerLaw& p) -> Estimate {
                const double lo = std::max(a, 1.0);
                if (!(b > lo)) return {};
                const double beta = p.beta1(x);
                return {p.c0(x) * power_integral(k - 1.0 - beta, lo, b, "power-law tail moment"), 0.0};
            },
            [&](const BigJumpStretchedExp& s) -> Estimate {
                const double lo = std::max(a, 1.0);
                if (!(b > lo)) return {};
                const double beta = s.beta2(x);
                if (!(beta > 0.0)) throw DomainError("stretched exponential needs beta2 > 0");
                // u = lambda r^beta turns the integral into an upper incomplete gamma.
                const double shape = (d + k) / beta;
                const double upper_lo = boost::math::tgamma(shape, s.lambda * std::pow(lo, beta));
                const double upper_hi =
                    std::isinf(b) ? 0.0 : boost::math::tgamma(shape, s.lambda * std::pow(b, beta));
                return {s.c0(x) * (upper_lo - upper_hi) / (beta * std::pow(s.lambda, shape)), 0.0};
            },
            [&](const HuntDifference& h) -> Estimate {
                const double c = h.c(x);
                if (a <= 0.0 && std::isinf(b) && k == 2) {
                    if (!geometry.hunt_second_radial) throw DivergentIntegral(geometry.hunt_divergence);
                    return {c * *geometry.hunt_second_radial, c * geometry.hunt_second_radial_error};
                }
                auto f = [&](double r) { return std::pow(r, k - 1.0 - h.alpha_r.at_radius(r)); };
                const double p = k - 1.0 - geometry.hunt_alpha_origin;
                const double q = k - 1.0 - geometry.hunt_alpha_infinity;
                quad::QuadratureResult res;
                if (a <= 0.0) {
                    res = quad::integrate_radial(f, 0.0, b, p, {}, q);
                } else if (std::isinf(b)) {
                    res = quad::integrate_radial(f, a, b, quad::kUnknownExponent, {}, q);
                } else {
                    res = quad::integrate_interval(f, a, b);
                }
                return {c * res.value, c * res.error_bound};
            },
        },
        component);
}

namespace {

struct Accumulator {
    int d;
    Matrix3 m{};
    Vec v;
    double scalar = 0.0;
    double error = 0.0;
};

// Visits each component with its radial view (nullptr for atoms).
template <class RadialFnT, class AtomFnT>
void for_each_component(const KernelSpec& kernel, RadialFnT&& on_radial, AtomFnT&& on_atoms)
{
    for (std::size_t i = 0; i < kernel.components().size(); ++i) {
        const KernelComponent& c = kernel.components()[i];
        RadialComponent storage;
        if (const RadialComponent* rc = as_radial(c, storage)) {
            on_radial(*rc, kernel.geometry(i));
        } else {
            on_atoms(std::get<CompoundPoissonAtoms>(c), kernel.geometry(i));
        }
    }
}

double angular_scaled_error(const Estimate& m, double angular, double angular_error)
{
    return m.error * std::fabs(angular) + std::fabs(m.value) * angular_error;
}

}  // namespace

double density(const KernelSpec& kernel, const Vec& x, const Vec& z)
{
    require_dim(kernel, x);
    if (kernel.has_atoms()) throw AtomicKernelError("density requested from a kernel with atoms");
    const double r = z.norm();
    if (r == 0.0) throw DomainError("density at z = 0");
    Vec theta = (1.0 / r) * z;
    double total = 0.0;
    for (const auto& c : kernel.components()) {
        if (const auto* cone = std::get_if<ConeRestriction>(&c)) {
            if (cone->cone.contains(theta)) total += radial_density(cone->base, kernel.dim(), x, r);
            continue;
        }
        RadialComponent storage;
        total += radial_density(*as_radial(c, storage), kernel.dim(), x, r);
    }
    return total;
}

Estimate second_moment(const KernelSpec& kernel, const Vec& x)
{
    require_dim(kernel, x);
    Estimate out;
    for_each_component(
        kernel,
        [&](const RadialComponent& rc, const ComponentGeometry& g) {
            const Estimate m = radial_moment(rc, g, kernel.dim(), x, 2, 0.0, quad::kInfinity);
            out.value += m.value * g.angular_mass;
            out.error += angular_scaled_error(m, g.angular_mass, g.angular_error);
        },
        [&](const CompoundPoissonAtoms& a, const ComponentGeometry&) {
            for (const Atom& atom : a.atoms) out.value += atom.weight * atom.z.norm_sq();
        });
    return out;
}

VecEstimate drift_tail(const KernelSpec& kernel, const Vec& x, double eps)
{
    require_dim(kernel, x);
    if (!(eps > 0.0)) throw DomainError("drift_tail needs eps > 0");
    VecEstimate out{Vec::zero(kernel.dim()), 0.0};
    if (kernel.odd_symmetric()) return out;
    const int d = kernel.dim();
    for_each_component(
        kernel,
        [&](const RadialComponent& rc, const ComponentGeometry& g) {
            if (g.odd_symmetric) return;
            const Estimate m = radial_moment(rc, g, d, x, 1, eps, quad::kInfinity);
            for (int i = 0; i < d; ++i) out.value[i] += m.value * g.angular_first[i];
            out.error += angular_scaled_error(m, 1.0, g.angular_error);
        },
        [&](const CompoundPoissonAtoms& a, const ComponentGeometry& g) {
            if (g.odd_symmetric) return;
            for (const Atom& atom : a.atoms)
                if (atom.z.norm() >= eps) out.value += atom.weight * atom.z;
        });
    return out;
}

namespace {

DiffusionMatrix matrix_over(const KernelSpec& kernel, const Vec& x, double a, double b)
{
    require_dim(kernel, x);
    const int d = kernel.dim();
    DiffusionMatrix out;
    out.x = x;
    out.d = d;
    for_each_component(
        kernel,
        [&](const RadialComponent& rc, const ComponentGeometry& g) {
            const Estimate m = radial_moment(rc, g, d, x, 2, a, b);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) out.a[i][j] += m.value * g.angular_second[i][j];
            out.quadrature_error += angular_scaled_error(m, g.angular_mass, g.angular_error);
        },
        [&](const CompoundPoissonAtoms& atoms, const ComponentGeometry&) {
            for (const Atom& atom : atoms.atoms) {
                const double r = atom.z.norm();
                if (r < a || r >= b) continue;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) out.a[i][j] += atom.weight * atom.z[i] * atom.z[j];
            }
        });
    return out;
}

}  // namespace

DiffusionMatrix diffusion_matrix(const KernelSpec& kernel, const Vec& x)
{
    return matrix_over(kernel, x, 0.0, quad::kInfinity);
}

DiffusionMatrix small_jump_matrix(const KernelSpec& kernel, const Vec& x, double eps)
{
    if (!(eps > 0.0)) throw DomainError("small_jump_matrix needs eps > 0");
    return matrix_over(kernel, x, 0.0, eps);
}

Estimate total_mass_tail(const KernelSpec& kernel, const Vec& x, double eps)
{
    require_dim(kernel, x);
    if (!(eps > 0.0)) throw DomainError("total_mass_tail needs eps > 0");
    Estimate out;
    for_each_component(
        kernel,
        [&](const RadialComponent& rc, const ComponentGeometry& g) {
            if (g.angular_mass == 0.0) return;
            const Estimate m = radial_moment(rc, g, kernel.dim(), x, 0, eps, quad::kInfinity);
            out.value += m.value * g.angular_mass;
            out.error += angular_scaled_error(m, g.angular_mass, g.angular_error);
        },
        [&](const CompoundPoissonAtoms& a, const ComponentGeometry&) {
            for (const Atom& atom : a.atoms)
                if (atom.z.norm() >= eps) out.value += atom.weight;
        });
    return out;
}

double hunt_density(const HuntDifference& kernel, const Vec& x, const Vec& y)
{
    const double r = (x - y).norm();
    if (r == 0.0) throw DomainError("Hunt kernel evaluated on the diagonal");
    return kernel.c(x) * std::pow(r, -(x.dim() + kernel.alpha_r.at_radius(r)));
}

HuntParts hunt_decompose(const HuntDifference& kernel, const Vec& x, const Vec& y)
{
    const double jxy = hunt_density(kernel, x, y);
    const double jyx = hunt_density(kernel, y, x);
    return HuntParts{jxy, 0.5 * (jxy + jyx), 0.5 * (jxy - jyx)};
}

KernelSpec scale_atoms(const KernelSpec& kernel, double factor)
{
    std::vector<KernelComponent> scaled;
    for (const auto& c : kernel.components()) {
        const auto* atoms = std::get_if<CompoundPoissonAtoms>(&c);
        if (!atoms) throw DomainError("scale_atoms: kernel has non-atomic components");
        CompoundPoissonAtoms s = *atoms;
        for (Atom& a : s.atoms) a.z *= factor;
        scaled.push_back(std::move(s));
    }
    return KernelSpec(kernel.dim(), std::move(scaled), kernel.id());
}

}  // namespace jumplab
