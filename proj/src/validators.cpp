// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/validators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "jumplab/error.hpp"
#include "jumplab/format.hpp"
#include "jumplab/quadrature.hpp"
#include "jumplab/sym_eigen.hpp"

namespace jumplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Verdict worst(Verdict a, Verdict b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

void set_part(CheckResult& r, std::string name, Verdict v)
{
    r.parts.emplace_back(std::move(name), v);
    r.verdict = worst(r.verdict, v);
}

void fail_at(CheckResult& r, const Vec& x, double value, std::string message)
{
    r.verdict = Verdict::fail;
    if (!r.witness) {
        r.witness = x;
        r.witness_value = value;
        r.message = std::move(message);
    }
}

std::string vec_text(const Vec& v)
{
    std::string s = "(";
    for (int i = 0; i < v.dim(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
    }
    return s + ")";
}

const RadialComponent* radial_of(const KernelComponent& c, RadialComponent& storage)
{
    if (const auto* cone = std::get_if<ConeRestriction>(&c)) return &cone->base;
    if (const auto* s = std::get_if<StableLikeSmall>(&c)) return &(storage = *s);
    if (const auto* s = std::get_if<BigJumpPowerLaw>(&c)) return &(storage = *s);
    if (const auto* s = std::get_if<BigJumpStretchedExp>(&c)) return &(storage = *s);
    if (const auto* s = std::get_if<HuntDifference>(&c)) return &(storage = *s);
    return nullptr;
}

struct Range {
    double min = kInf;
    double max = -kInf;
    Vec argmin;
    Vec argmax;
};

Range observe(const CoefficientFn& f, const StateGrid& grid)
{
    Range r;
    if (auto c = f.constant_value()) {
        r.min = r.max = *c;
        r.argmin = r.argmax = grid.points.front();
        return r;
    }
    for (const Vec& x : grid.points) {
        const double v = f(x);
        if (v < r.min) {
            r.min = v;
            r.argmin = x;
        }
        if (v > r.max) {
            r.max = v;
            r.argmax = x;
        }
    }
    return r;
}

std::vector<Vec> sphere_directions(int d, int count)
{
    std::vector<Vec> dirs;
    if (d == 1) {
        dirs = {Vec{1.0}, Vec{-1.0}};
    } else if (d == 2) {
        for (int k = 0; k < count; ++k) {
            const double t = 2.0 * std::numbers::pi * (k + 0.5) / count;
            dirs.push_back(Vec{std::cos(t), std::sin(t)});
        }
    } else {
        // Fibonacci lattice.
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double zc = 1.0 - (2.0 * k + 1.0) / count;
            const double rho = std::sqrt(1.0 - zc * zc);
            dirs.push_back(Vec{rho * std::cos(golden * k), rho * std::sin(golden * k), zc});
        }
    }
    return dirs;
}

std::vector<Vec> default_z_samples(int d)
{
    std::vector<Vec> out;
    const auto dirs = sphere_directions(d, d == 2 ? 16 : 32);
    for (int k = 0; k <= 30; ++k) {
        const double r = std::pow(10.0, -3.0 + 5.0 * k / 30.0);
        for (const Vec& th : dirs) out.push_back(r * th);
    }
    return out;
}

CheckResult second_moment_sweep(const KernelSpec& kernel, const StateGrid& grid, std::vector<double>* column)
{
    CheckResult r;
    r.name = "second_moment";
    r.assumption = "generator: sup_x int |z|^2 N(x,dz) < inf";
    double sup = -kInf, inf = kInf, err = 0.0;
    Vec arg;
    for (const Vec& x : grid.points) {
        try {
            const Estimate m = second_moment(kernel, x);
            if (m.value > sup) {
                sup = m.value;
                arg = x;
            }
            inf = std::min(inf, m.value);
            err = std::max(err, m.error);
            if (column) column->push_back(m.value);
        } catch (const Error& e) {
            fail_at(r, x, kInf, e.what());
            if (column) column->push_back(kInf);
        }
    }
    r.add("sup", r.verdict == Verdict::fail ? kInf : sup);
    r.add("inf", inf);
    r.add("max_quadrature_error", err);
    r.add("grid_points", static_cast<double>(grid.points.size()));
    if (r.verdict != Verdict::fail) {
        r.witness = arg;
        r.witness_value = sup;
    }
    return r;
}

CheckResult zero_drift_sweep(const KernelSpec& kernel, const StateGrid& grid, const std::vector<double>& epsilons,
                             double tolerance, std::vector<double>* column)
{
    CheckResult r;
    r.name = "zero_drift";
    r.assumption = "zero drift: int_{|z|>=eps} z N(x,dz) = 0";
    for (double eps : epsilons)
        if (!(eps > 0.0)) throw DomainError("drift thresholds must be positive");
    r.add("tolerance", tolerance);
    if (kernel.odd_symmetric()) {
        r.add("max_abs", 0.0);
        r.add("symmetry_short_circuit", 1.0);
        if (column) column->assign(grid.points.size(), 0.0);
        return r;
    }
    double max_abs = 0.0;
    double max_eps = 0.0;
    Vec arg = grid.points.front();
    for (const Vec& x : grid.points) {
        double row = 0.0;
        try {
            for (double eps : epsilons) {
                const VecEstimate v = drift_tail(kernel, x, eps);
                for (int i = 0; i < kernel.dim(); ++i) {
                    row = std::max(row, std::fabs(v.value[i]));
                    if (std::fabs(v.value[i]) > max_abs) {
                        max_abs = std::fabs(v.value[i]);
                        max_eps = eps;
                        arg = x;
                    }
                }
            }
        } catch (const Error& e) {
            fail_at(r, x, kInf, e.what());
            row = kInf;
        }
        if (column) column->push_back(row);
    }
    r.add("max_abs", max_abs);
    r.add("epsilon_at_max", max_eps);
    if (max_abs > tolerance) {
        fail_at(r, arg, max_abs,
                "drift " + format_double(max_abs) + " at x = " + vec_text(arg) + ", eps = " + format_double(max_eps));
    }
    return r;
}

CheckResult ellipticity_sweep(const KernelSpec& kernel, const StateGrid& grid, double tolerance,
                              EllipticityBounds* bounds, std::vector<double>* lo_col, std::vector<double>* hi_col)
{
    CheckResult r;
    r.name = "ellipticity";
    r.assumption = "bounds: lambda |xi|^2 <= xi^T a(x) xi <= Lambda |xi|^2";
    double lambda = kInf, Lambda = -kInf, err = 0.0;
    Vec argmin = grid.points.front(), argmax = grid.points.front();
    for (const Vec& x : grid.points) {
        try {
            const DiffusionMatrix a = diffusion_matrix(kernel, x);
            const auto ev = symmetric_eigenvalues(a.a, a.d);
            const double lo = ev[0], hi = ev[a.d - 1];
            if (lo < lambda) {
                lambda = lo;
                argmin = x;
            }
            if (hi > Lambda) {
                Lambda = hi;
                argmax = x;
            }
            err = std::max(err, a.quadrature_error);
            if (lo_col) lo_col->push_back(lo);
            if (hi_col) hi_col->push_back(hi);
        } catch (const Error& e) {
            fail_at(r, x, kInf, e.what());
            if (lo_col) lo_col->push_back(kInf);
            if (hi_col) hi_col->push_back(kInf);
        }
    }
    r.add("lambda_hat", lambda);
    r.add("Lambda_hat", Lambda);
    r.add("max_quadrature_error", err);
    r.add("tolerance", tolerance);
    if (bounds) *bounds = {lambda, Lambda};
    if (r.verdict != Verdict::fail && !(lambda > tolerance)) {
        fail_at(r, argmin, lambda, "smallest eigenvalue " + format_double(lambda) + " at x = " + vec_text(argmin));
    }
    if (r.verdict != Verdict::fail) {
        r.witness = argmin;
        r.witness_value = lambda;
    }
    return r;
}

double envelope_density(const KernelSpec& env, const Vec& x, const Vec& z)
{
    return env.empty() ? 0.0 : density(env, x, z);
}

}  // namespace

std::string verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::advisory: return "advisory";
    case Verdict::fail: return "fail";
    }
    return "?";
}

StateGrid StateGrid::uniform(int d, double lo, double hi, int n)
{
    if (d < 1 || d > kMaxDim) throw DomainError("grid dimension must be 1, 2 or 3");
    if (n < 1 || !(hi >= lo)) throw DomainError("grid needs n >= 1 and hi >= lo");
    StateGrid g;
    g.d = d;
    auto coord = [&](int k) { return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (n - 1); };
    const int n2 = d >= 2 ? n : 1, n3 = d >= 3 ? n : 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n2; ++j)
            for (int k = 0; k < n3; ++k) {
                Vec x(d);
                x[0] = coord(i);
                if (d >= 2) x[1] = coord(j);
                if (d >= 3) x[2] = coord(k);
                g.points.push_back(x);
            }
    for (int k = 1; k <= 12; ++k) g.pair_radii.push_back(std::ldexp(1.0, -k));
    return g;
}

StateGrid StateGrid::defaults(int d)
{
    return d == 1 ? uniform(1, -10.0, 10.0, 201) : uniform(d, -5.0, 5.0, 41);
}

void StateGrid::validate() const
{
    if (points.empty()) throw DomainError("state grid is empty");
    for (const Vec& x : points)
        if (x.dim() != d) throw DomainError("grid point dimension mismatch");
    for (std::size_t i = 0; i < pair_radii.size(); ++i) {
        if (!(pair_radii[i] > 0.0)) throw DomainError("pair radii must be positive");
        if (i > 0 && !(pair_radii[i] < pair_radii[i - 1])) throw DomainError("pair radii must strictly decrease");
    }
}

std::optional<double> CheckResult::find(const std::string& key) const
{
    for (const auto& [k, v] : evidence)
        if (k == key) return v;
    return std::nullopt;
}

bool ValidationReport::any_fail() const
{
    return std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.verdict == Verdict::fail; });
}

const CheckResult* ValidationReport::find(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::string ValidationReport::to_text() const
{
    std::ostringstream os;
    os << "kernel = " << kernel_id << "\n";
    os << "dimension = " << d << "\n";
    os << "grid_points = " << grid_points << "\n";
    os << "verdict = " << (any_fail() ? "fail" : "pass") << "\n";
    for (const auto& c : checks) {
        os << "\n[check " << c.name << "]\n";
        os << "assumption = " << c.assumption << "\n";
        os << "verdict = " << verdict_name(c.verdict) << "\n";
        for (const auto& [k, v] : c.evidence) os << "evidence." << k << " = " << format_double(v) << "\n";
        for (const auto& [k, v] : c.parts) os << "part." << k << " = " << verdict_name(v) << "\n";
        if (c.witness) {
            os << "witness.x = " << vec_text(*c.witness) << "\n";
            os << "witness.value = " << format_double(c.witness_value) << "\n";
        }
        if (!c.message.empty()) os << "message = " << c.message << "\n";
    }
    return os.str();
}

std::string ValidationReport::to_csv() const
{
    std::ostringstream os;
    for (int i = 0; i < d; ++i) os << (i ? "," : "") << "x" << (i + 1);
    for (const auto& c : point_columns) os << "," << c;
    os << "\n";
    for (const auto& row : point_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
    return os.str();
}

CheckResult check_second_moment(const KernelSpec& kernel, const StateGrid& grid)
{
    grid.validate();
    return second_moment_sweep(kernel, grid, nullptr);
}

CheckResult check_zero_drift(const KernelSpec& kernel, const StateGrid& grid, const std::vector<double>& epsilons,
                             double tolerance)
{
    grid.validate();
    return zero_drift_sweep(kernel, grid, epsilons, tolerance, nullptr);
}

CheckResult check_ellipticity(const KernelSpec& kernel, const StateGrid& grid, double tolerance,
                              EllipticityBounds* bounds)
{
    grid.validate();
    return ellipticity_sweep(kernel, grid, tolerance, bounds, nullptr, nullptr);
}

CheckResult check_envelopes(const KernelSpec& kernel, const EnvelopePair& envelopes, const StateGrid& grid,
                            const std::vector<Vec>& z_samples)
{
    grid.validate();
    if (kernel.has_atoms() || envelopes.nu1.has_atoms() || envelopes.nu2.has_atoms()) {
        throw AtomicKernelError("envelope comparison needs density kernels");
    }
    if (envelopes.nu2.dim() != kernel.dim() || (!envelopes.nu1.empty() && envelopes.nu1.dim() != kernel.dim())) {
        throw DomainError("envelope dimension does not match the kernel");
    }
    CheckResult r;
    r.name = "envelopes";
    r.assumption = "bounds: nu1(dz) <= N(x,dz) <= nu2(dz)";
    const std::vector<Vec> zs = z_samples.empty() ? default_z_samples(kernel.dim()) : z_samples;

    // Envelopes are state free, so their densities are evaluated once.
    const Vec origin = Vec::zero(kernel.dim());
    std::vector<double> lower(zs.size()), upper(zs.size());
    for (std::size_t k = 0; k < zs.size(); ++k) {
        if (zs[k].norm() == 0.0) throw DomainError("z samples must avoid the origin");
        lower[k] = envelope_density(envelopes.nu1, origin, zs[k]);
        upper[k] = envelope_density(envelopes.nu2, origin, zs[k]);
    }
    double upper_excess = 0.0, lower_excess = 0.0;
    Verdict pointwise = Verdict::pass;
    for (const Vec& x : grid.points) {
        for (std::size_t k = 0; k < zs.size(); ++k) {
            const double n = density(kernel, x, zs[k]);
            const double slack = 1e-12 * std::max(n, 1e-300);
            if (n - upper[k] > upper_excess) upper_excess = n - upper[k];
            if (lower[k] - n > lower_excess) lower_excess = lower[k] - n;
            if (n > upper[k] + slack) {
                pointwise = Verdict::fail;
                fail_at(r, x, n,
                        "density " + format_double(n) + " above nu2 " + format_double(upper[k]) + " at z = " +
                            vec_text(zs[k]));
            } else if (n + slack < lower[k]) {
                pointwise = Verdict::fail;
                fail_at(r, x, n,
                        "density " + format_double(n) + " below nu1 " + format_double(lower[k]) + " at z = " +
                            vec_text(zs[k]));
            }
        }
    }
    set_part(r, "pointwise", pointwise);
    r.add("max_upper_excess", upper_excess);
    r.add("max_lower_excess", lower_excess);
    r.add("z_samples", static_cast<double>(zs.size()));

    double min_coord = 0.0;
    if (!envelopes.nu1.empty()) {
        const DiffusionMatrix a1 = diffusion_matrix(envelopes.nu1, origin);
        min_coord = kInf;
        for (int i = 0; i < a1.d; ++i) min_coord = std::min(min_coord, a1.a[i][i]);
    }
    r.add("nu1_min_coordinate_moment", min_coord);
    if (min_coord > 0.0) {
        set_part(r, "nu1_positive", Verdict::pass);
    } else {
        set_part(r, "nu1_positive", Verdict::fail);
        fail_at(r, origin, min_coord, "lower envelope has a vanishing coordinate second moment");
    }
    try {
        const Estimate m2 = second_moment(envelopes.nu2, origin);
        r.add("nu2_second_moment", m2.value);
        set_part(r, "nu2_finite", Verdict::pass);
    } catch (const Error& e) {
        r.add("nu2_second_moment", kInf);
        set_part(r, "nu2_finite", Verdict::fail);
        fail_at(r, origin, kInf, std::string("upper envelope second moment: ") + e.what());
    }
    return r;
}

std::vector<double> modulus_of_continuity(const CoefficientFn& f, const StateGrid& grid)
{
    std::vector<double> omega(grid.pair_radii.size(), 0.0);
    if (f.state_free()) return omega;
    for (const Vec& x : grid.points) {
        const double fx = f(x);
        for (std::size_t k = 0; k < grid.pair_radii.size(); ++k) {
            const double r = grid.pair_radii[k];
            for (int i = 0; i < grid.d; ++i) {
                for (double s : {-1.0, 1.0}) {
                    Vec y = x;
                    y[i] += s * r;
                    omega[k] = std::max(omega[k], std::fabs(fx - f(y)));
                }
            }
        }
    }
    return omega;
}

CheckResult check_index_regularity(const CoefficientFn& alpha, const StateGrid& grid)
{
    grid.validate();
    CheckResult r;
    r.name = "index_regularity";
    r.assumption = "index: 0 < inf alpha <= sup alpha < 2, |log r| omega(r) -> 0, int_0^1 omega(r)/r dr < inf";
    const Range range = observe(alpha, grid);
    r.add("alpha_min", range.min);
    r.add("alpha_max", range.max);
    if (range.min > 0.0 && range.max < 2.0) {
        set_part(r, "range", Verdict::pass);
    } else {
        set_part(r, "range", Verdict::fail);
        const bool low = !(range.min > 0.0);
        fail_at(r, low ? range.argmin : range.argmax, low ? range.min : range.max, "index outside (0, 2)");
    }

    const std::vector<double> omega = modulus_of_continuity(alpha, grid);
    double dini = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        r.add("omega(" + format_double(grid.pair_radii[k]) + ")", omega[k]);
        dini += omega[k] * std::numbers::ln2;
    }
    const double log_modulus = omega.empty() ? 0.0 : std::fabs(std::log(grid.pair_radii.back())) * omega.back();
    r.add("log_modulus_at_min_radius", log_modulus);
    r.add("dini_sum", dini);

    Verdict asymptotic = Verdict::advisory;
    if (alpha.state_free()) {
        asymptotic = Verdict::pass;
    } else if (alpha.lipschitz()) {
        const double L = *alpha.lipschitz();
        r.add("lipschitz", L);
        bool within = true;
        for (std::size_t k = 0; k < omega.size(); ++k)
            within = within && omega[k] <= L * grid.pair_radii[k] * (1.0 + 1e-9) + 1e-15;
        if (within) {
            asymptotic = Verdict::pass;
        } else if (r.message.empty()) {
            r.message = "observed modulus exceeds the declared Lipschitz constant";
        }
    }
    set_part(r, "log_modulus", asymptotic);
    set_part(r, "dini", asymptotic);
    if (asymptotic == Verdict::advisory && r.message.empty()) {
        r.message = "asymptotic conditions estimated on pair radii down to " + format_double(grid.pair_radii.back());
    }
    return r;
}

CheckResult check_big_jump_conditions(const KernelSpec& kernel, std::size_t component, const StateGrid& grid)
{
    grid.validate();
    const KernelComponent& comp = kernel.components().at(component);
    RadialComponent storage;
    const RadialComponent* rc = radial_of(comp, storage);
    const bool power = rc && std::holds_alternative<BigJumpPowerLaw>(*rc);
    const bool stretched = rc && std::holds_alternative<BigJumpStretchedExp>(*rc);
    if (!power && !stretched) throw DomainError("component is not a big-jump family");
    const ComponentGeometry& geom = kernel.geometry(component);

    CheckResult r;
    r.name = "big_jump";
    r.assumption = "big jumps: n0 <= envelope with finite second moment, continuous in x, zero mean";
    r.add("component", static_cast<double>(component));

    const CoefficientFn& c0 = power ? std::get<BigJumpPowerLaw>(*rc).c0 : std::get<BigJumpStretchedExp>(*rc).c0;
    const CoefficientFn& exponent =
        power ? std::get<BigJumpPowerLaw>(*rc).beta1 : std::get<BigJumpStretchedExp>(*rc).beta2;
    const Range cr = observe(c0, grid);
    const Range er = observe(exponent, grid);
    const double c_sup = c0.declared_bounds() ? c0.declared_bounds()->hi : cr.max;
    const double e_inf = exponent.declared_bounds() ? exponent.declared_bounds()->lo : er.min;
    r.add("c0_sup", c_sup);
    r.add("exponent_inf", e_inf);

    const double threshold = power ? 2.0 : 0.0;
    if (e_inf > threshold) {
        RadialComponent envelope;
        if (power) {
            envelope = BigJumpPowerLaw{CoefficientFn::constant(c_sup), CoefficientFn::constant(e_inf)};
        } else {
            const auto& s = std::get<BigJumpStretchedExp>(*rc);
            envelope = BigJumpStretchedExp{CoefficientFn::constant(c_sup), s.lambda, CoefficientFn::constant(e_inf)};
        }
        const Estimate m = radial_moment(envelope, geom, kernel.dim(), grid.points.front(), 2, 1.0, kInf);
        r.add("envelope_second_moment", m.value * geom.angular_mass);
        set_part(r, "envelope", Verdict::pass);
    } else {
        r.add("envelope_second_moment", kInf);
        set_part(r, "envelope", Verdict::fail);
        fail_at(r, er.argmin, er.min,
                std::string(power ? "beta1" : "beta2") + " infimum " + format_double(e_inf) + " <= " +
                    format_double(threshold));
    }

    Verdict continuity = Verdict::advisory;
    const bool c_ok = c0.state_free() || c0.lipschitz();
    const bool e_ok = exponent.state_free() || exponent.lipschitz();
    if (c_ok && e_ok) continuity = Verdict::pass;
    if (continuity == Verdict::advisory) {
        const auto wc = modulus_of_continuity(c0, grid);
        const auto we = modulus_of_continuity(exponent, grid);
        r.add("c0_modulus_min_radius", wc.empty() ? 0.0 : wc.back());
        r.add("exponent_modulus_min_radius", we.empty() ? 0.0 : we.back());
    }
    set_part(r, "continuity", continuity);

    if (geom.odd_symmetric) {
        r.add("max_abs_mean", 0.0);
        set_part(r, "zero_mean", Verdict::pass);
    } else {
        double worst_mean = 0.0;
        Vec arg = grid.points.front();
        for (const Vec& x : grid.points) {
            const Estimate m = radial_moment(*rc, geom, kernel.dim(), x, 1, 1.0, kInf);
            for (int i = 0; i < kernel.dim(); ++i) {
                const double v = std::fabs(m.value * geom.angular_first[i]);
                if (v > worst_mean) {
                    worst_mean = v;
                    arg = x;
                }
            }
        }
        r.add("max_abs_mean", worst_mean);
        if (worst_mean <= 1e-7) {
            set_part(r, "zero_mean", Verdict::pass);
        } else {
            set_part(r, "zero_mean", Verdict::fail);
            fail_at(r, arg, worst_mean, "big-jump part has non-zero mean");
        }
    }
    return r;
}

CheckResult check_hunt_conditions(const KernelSpec& kernel, std::size_t component, const StateGrid& grid)
{
    grid.validate();
    const KernelComponent& comp = kernel.components().at(component);
    RadialComponent storage;
    const RadialComponent* rc = radial_of(comp, storage);
    if (!rc || !std::holds_alternative<HuntDifference>(*rc)) throw DomainError("component is not a Hunt kernel");
    const HuntDifference& h = std::get<HuntDifference>(*rc);
    const ComponentGeometry& geom = kernel.geometry(component);
    const Vec& x0 = grid.points.front();

    CheckResult r;
    r.name = "hunt";
    r.assumption = "Hunt kernel: int_0^inf r^{1-alpha(r)} dr < inf, Levy-type and antisymmetric bounds, tail mass in L^inf";
    r.add("component", static_cast<double>(component));
    r.add("alpha_at_origin", geom.hunt_alpha_origin);
    r.add("alpha_at_infinity", geom.hunt_alpha_infinity);

    double alpha_min = kInf;
    double alpha_arg = 0.0;
    for (int k = 0; k <= 160; ++k) {
        const double rr = std::pow(10.0, -8.0 + 0.1 * k);
        const double a = h.alpha_r.at_radius(rr);
        if (a < alpha_min) {
            alpha_min = a;
            alpha_arg = rr;
        }
    }
    r.add("alpha_min_sampled", alpha_min);
    if (alpha_min > 0.0) {
        set_part(r, "alpha_positive", Verdict::pass);
    } else {
        set_part(r, "alpha_positive", Verdict::fail);
        fail_at(r, x0, alpha_min, "alpha(r) <= 0 at r = " + format_double(alpha_arg));
    }

    if (geom.hunt_second_radial) {
        r.add("integrable_0", *geom.hunt_second_radial);
        set_part(r, "integrable_0", Verdict::pass);
    } else {
        r.add("integrable_0", kInf);
        set_part(r, "integrable_0", Verdict::fail);
        fail_at(r, x0, kInf, "int_0^inf r^{1-alpha(r)} dr: " + geom.hunt_divergence);
    }

    const Range cr = observe(h.c, grid);
    const double c_inf = h.c.declared_bounds() ? std::min(h.c.declared_bounds()->lo, cr.min) : cr.min;
    const double c_sup = h.c.declared_bounds() ? std::max(h.c.declared_bounds()->hi, cr.max) : cr.max;
    r.add("c_inf", c_inf);
    r.add("c_sup", c_sup);
    if (c_inf > 0.0 && std::isfinite(c_sup)) {
        set_part(r, "c_bounds", Verdict::pass);
    } else {
        set_part(r, "c_bounds", Verdict::fail);
        fail_at(r, cr.argmin, cr.min, "c must be bounded below by a positive constant");
    }

    const double area = geom.angular_mass;
    auto alpha_at = [&](double rr) { return h.alpha_r.at_radius(rr); };
    double near = kInf, far = kInf;
    try {
        near = quad::integrate_radial([&](double rr) { return std::pow(rr, 1.0 - alpha_at(rr)); }, 0.0, 1.0,
                                      1.0 - geom.hunt_alpha_origin)
                   .value;
    } catch (const Error&) {
    }
    try {
        far = quad::integrate_radial([&](double rr) { return std::pow(rr, -1.0 - alpha_at(rr)); }, 1.0, kInf,
                                     quad::kUnknownExponent, {}, -1.0 - geom.hunt_alpha_infinity)
                  .value;
    } catch (const Error&) {
    }
    const double levy = c_sup * area * (near + far);
    r.add("levy_type_bound", levy);
    if (std::isfinite(levy)) {
        set_part(r, "levy_type", Verdict::pass);
    } else {
        set_part(r, "levy_type", Verdict::fail);
        fail_at(r, x0, kInf, "int (1 ^ r^2) r^{-1-alpha(r)} dr diverges");
    }

    if (h.c.state_free()) {
        r.add("antisymmetric_bound", 0.0);
        set_part(r, "antisymmetric", Verdict::pass);
    } else {
        const auto g = modulus_of_continuity(h.c, grid);
        double dini = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double rr = grid.pair_radii[k];
            dini += g[k] * g[k] * std::pow(rr, -alpha_at(rr)) * std::numbers::ln2;
        }
        r.add("g_c_dini_sum", dini);
        const double osc = c_sup - c_inf;
        const double scale = area / (4.0 * std::max(c_inf, 1e-300));
        if (h.c.lipschitz()) {
            const double L = *h.c.lipschitz();
            const double bound = scale * (L * L * near + osc * osc * far);
            r.add("antisymmetric_bound", bound);
            set_part(r, "antisymmetric", std::isfinite(bound) ? Verdict::pass : Verdict::fail);
        } else {
            r.add("antisymmetric_bound", scale * (dini + osc * osc * far));
            set_part(r, "antisymmetric", Verdict::advisory);
        }
    }

    const double tail = c_sup * area * far;
    r.add("tail_mass_sup", tail);
    set_part(r, "tail_mass_linf", std::isfinite(tail) ? Verdict::pass : Verdict::fail);
    return r;
}

CheckResult check_cone_symmetry(const Cone& cone, int d, int samples)
{
    CheckResult r;
    r.name = "cone_symmetry";
    r.assumption = "cone: declared symmetry A = -A and permutation invariance";
    const auto dirs = sphere_directions(d, samples);
    r.add("directions", static_cast<double>(dirs.size()));
    if (cone.symmetric) {
        Verdict v = Verdict::pass;
        for (const Vec& th : dirs) {
            if (cone.contains(th) != cone.contains(-th)) {
                v = Verdict::fail;
                fail_at(r, th, 1.0, "direction in A but its negative is not (or vice versa)");
                break;
            }
        }
        set_part(r, "antipodal", v);
    }
    if (cone.permutation_symmetric && d > 1) {
        Verdict v = Verdict::pass;
        std::array<int, kMaxDim> perm{0, 1, 2};
        for (const Vec& th : dirs) {
            std::array<int, kMaxDim> p = perm;
            do {
                Vec q(d);
                for (int i = 0; i < d; ++i) q[i] = th[p[i]];
                if (cone.contains(th) != cone.contains(q)) {
                    v = Verdict::fail;
                    fail_at(r, th, 1.0, "permuted direction " + vec_text(q) + " disagrees");
                    break;
                }
            } while (std::next_permutation(p.begin(), p.begin() + d));
            if (v == Verdict::fail) break;
        }
        set_part(r, "permutation", v);
    }
    if (r.parts.empty()) r.message = "no symmetry declared";
    return r;
}

CheckResult check_coefficients(const KernelSpec& kernel, const StateGrid& grid)
{
    grid.validate();
    CheckResult r;
    r.name = "coefficients";
    r.assumption = "index: c bounded by positive constants; densities non-negative";
    auto inspect = [&](const std::string& label, const CoefficientFn& f, bool strictly_positive) {
        const Range rg = observe(f, grid);
        r.add(label + ".min", rg.min);
        r.add(label + ".max", rg.max);
        Verdict v = Verdict::pass;
        const bool ok = strictly_positive ? rg.min > 0.0 : rg.min >= 0.0;
        if (!ok) {
            v = Verdict::fail;
            fail_at(r, rg.argmin, rg.min, label + (strictly_positive ? " must be positive" : " must be non-negative"));
        }
        if (const auto& b = f.declared_bounds()) {
            const double slack = 1e-12 * std::max(1.0, std::max(std::fabs(b->lo), std::fabs(b->hi)));
            if (rg.min < b->lo - slack) {
                v = Verdict::fail;
                fail_at(r, rg.argmin, rg.min, label + " below its declared lower bound " + format_double(b->lo));
            }
            if (rg.max > b->hi + slack) {
                v = Verdict::fail;
                fail_at(r, rg.argmax, rg.max, label + " above its declared upper bound " + format_double(b->hi));
            }
        }
        set_part(r, label, v);
    };
    for (std::size_t i = 0; i < kernel.components().size(); ++i) {
        RadialComponent storage;
        const RadialComponent* rc = radial_of(kernel.components()[i], storage);
        if (!rc) continue;
        const std::string p = "component[" + std::to_string(i) + "].";
        std::visit(
            [&](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, StableLikeSmall>) {
                    inspect(p + "c", c.c, true);
                    inspect(p + "alpha", c.alpha, true);
                } else if constexpr (std::is_same_v<T, BigJumpPowerLaw>) {
                    inspect(p + "c0", c.c0, false);
                    inspect(p + "beta1", c.beta1, true);
                } else if constexpr (std::is_same_v<T, BigJumpStretchedExp>) {
                    inspect(p + "c0", c.c0, false);
                    inspect(p + "beta2", c.beta2, true);
                } else {
                    inspect(p + "c", c.c, true);
                }
            },
            *rc);
    }
    return r;
}

ValidationReport validate_all(const KernelSpec& kernel, const StateGrid& grid, const ValidatorOptions& options,
                              const std::optional<EnvelopePair>& envelopes, EllipticityBounds* bounds)
{
    grid.validate();
    if (grid.d != kernel.dim()) throw DomainError("grid and kernel dimensions differ");
    ValidationReport report;
    report.kernel_id = kernel.id();
    report.d = kernel.dim();
    report.grid_points = grid.points.size();

    std::vector<double> m2, drift, lo, hi;
    report.checks.push_back(check_coefficients(kernel, grid));
    report.checks.push_back(second_moment_sweep(kernel, grid, &m2));
    const bool moment_ok = report.checks.back().verdict != Verdict::fail;
    report.checks.push_back(zero_drift_sweep(kernel, grid, options.epsilons, options.drift_tolerance, &drift));
    if (moment_ok) {
        report.checks.push_back(
            ellipticity_sweep(kernel, grid, options.eigenvalue_tolerance, bounds, &lo, &hi));
    } else {
        CheckResult skipped;
        skipped.name = "ellipticity";
        skipped.assumption = "bounds: lambda |xi|^2 <= xi^T a(x) xi <= Lambda |xi|^2";
        skipped.verdict = Verdict::advisory;
        skipped.message = "skipped: second moment is not finite";
        report.checks.push_back(skipped);
        lo.assign(grid.points.size(), kInf);
        hi.assign(grid.points.size(), kInf);
    }
    if (envelopes && !kernel.has_atoms()) report.checks.push_back(check_envelopes(kernel, *envelopes, grid));

    for (std::size_t i = 0; i < kernel.components().size(); ++i) {
        const KernelComponent& c = kernel.components()[i];
        if (const auto* cone = std::get_if<ConeRestriction>(&c)) {
            report.checks.push_back(check_cone_symmetry(cone->cone, kernel.dim()));
        }
        RadialComponent storage;
        const RadialComponent* rc = radial_of(c, storage);
        if (!rc) continue;
        if (const auto* s = std::get_if<StableLikeSmall>(rc)) {
            CheckResult idx = check_index_regularity(s->alpha, grid);
            idx.add("component", static_cast<double>(i));
            report.checks.push_back(std::move(idx));
        } else if (std::holds_alternative<HuntDifference>(*rc)) {
            report.checks.push_back(check_hunt_conditions(kernel, i, grid));
        } else {
            report.checks.push_back(check_big_jump_conditions(kernel, i, grid));
        }
    }

    report.point_columns = {"second_moment", "max_abs_drift", "lambda_min", "lambda_max"};
    for (std::size_t p = 0; p < grid.points.size(); ++p) {
        std::vector<double> row(grid.points[p].span().begin(), grid.points[p].span().end());
        row.push_back(m2[p]);
        row.push_back(drift[p]);
        row.push_back(lo[p]);
        row.push_back(hi[p]);
        report.point_rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace jumplab
