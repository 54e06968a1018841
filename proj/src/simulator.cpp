// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "jumplab/error.hpp"
#include "jumplab/format.hpp"
#include "jumplab/quadrature.hpp"
#include "jumplab/rng.hpp"

namespace jumplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kCellsPerOctave = 16;
constexpr int kTableOctaves = 40;  // table runs up to 2^40, Pareto beyond

Vec uniform_direction(int d, Rng& rng)
{
    if (d == 1) return Vec{rng.uniform() < 0.5 ? -1.0 : 1.0};
    if (d == 2) {
        const double t = 2.0 * std::numbers::pi * rng.uniform();
        return Vec{std::cos(t), std::sin(t)};
    }
    const double zc = 2.0 * rng.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double rho = std::sqrt(std::max(0.0, 1.0 - zc * zc));
    return Vec{rho * std::cos(phi), rho * std::sin(phi), zc};
}

// Radial law r^{-1-alpha(r)} dr on [eps, inf) as a table of log-spaced cells,
// each sampled by rejection from a local power law.
struct HuntTable {
    std::vector<double> edges;       // cell boundaries, edges[0] = eps
    std::vector<double> cumulative;  // cumulative mass through cell i
    std::vector<double> local_alpha;
    std::vector<double> bound;
    double tail_alpha = 0.0;
    double total = 0.0;

    void build(const HuntDifference& h, double eps, double alpha_infinity)
    {
        edges.push_back(eps);
        const int k0 = static_cast<int>(std::floor(std::log2(eps) * kCellsPerOctave)) + 1;
        for (int k = k0; k <= kTableOctaves * kCellsPerOctave; ++k)
            edges.push_back(std::exp2(static_cast<double>(k) / kCellsPerOctave));
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const double lo = edges[i], hi = edges[i + 1];
            auto f = [&](double r) { return std::pow(r, -1.0 - h.alpha_r.at_radius(r)); };
            acc += quad::integrate_interval(f, lo, hi).value;
            cumulative.push_back(acc);
            const double a = h.alpha_r.at_radius(std::sqrt(lo * hi));
            double m = 0.0;
            for (int j = 0; j <= 32; ++j) {
                const double r = lo * std::pow(hi / lo, j / 32.0);
                m = std::max(m, std::pow(r, a - h.alpha_r.at_radius(r)));
            }
            local_alpha.push_back(a);
            bound.push_back(m * (1.0 + 1e-6));
        }
        tail_alpha = alpha_infinity;
        if (!(tail_alpha > 0.0)) throw DivergentIntegral("Hunt tail mass diverges: alpha(r) <= 0 at infinity");
        acc += std::pow(edges.back(), -tail_alpha) / tail_alpha;
        total = acc;
    }

    double sample(const HuntDifference& h, Rng& rng) const
    {
        const double target = rng.uniform() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        if (it == cumulative.end()) return edges.back() * std::pow(rng.uniform_pos(), -1.0 / tail_alpha);
        const std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
        const double lo = edges[i], hi = edges[i + 1], a = local_alpha[i];
        for (;;) {
            double r;
            const double u = rng.uniform();
            if (a == 0.0) {
                r = lo * std::pow(hi / lo, u);
            } else {
                const double plo = std::pow(lo, -a), phi = std::pow(hi, -a);
                r = std::pow(plo - u * (plo - phi), -1.0 / a);
            }
            r = std::clamp(r, lo, hi);
            const double ratio = std::pow(r, a - h.alpha_r.at_radius(r));
            if (ratio > bound[i]) throw EnvelopeViolation("Hunt radial sampler bound exceeded at r = " + format_double(r));
            if (rng.uniform() * bound[i] <= ratio) return r;
        }
    }
};

struct ComponentPlan {
    bool atomic = false;
    RadialComponent radial;
    const Cone* cone = nullptr;
    const ComponentGeometry* geom = nullptr;
    bool state_free = false;
    double fixed_rate = 0.0;

    // atoms with |z| >= eps
    std::vector<Atom> atoms;
    std::vector<double> cumulative;
    double small_var_atoms = 0.0;
    double total_var_atoms = 0.0;

    // Hunt kernels: rate and variances are c(x) times these
    bool hunt = false;
    HuntTable table;
    double hunt_small = 0.0;
    double hunt_total = kInf;
};

}  // namespace

struct Simulator::Plan {
    std::vector<ComponentPlan> components;
    bool state_free = false;
    double fixed_rate = 0.0;
    bool variance_known = true;
    double fixed_fraction = 0.0;
    Matrix3 fixed_small{};
};

void SimConfig::validate() const
{
    if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
    if (!(dominating_rate_margin >= 1.0)) throw DomainError("dominating rate margin must be >= 1");
    if (max_jumps == 0) throw DomainError("max_jumps must be positive");
}

Vec Path::final_state() const
{
    Vec x = x0;
    for (const Vec& z : jump_vectors) x += z;
    return x;
}

Vec state_at(const Path& path, double t)
{
    if (!(t >= 0.0 && t <= path.t_end)) {
        throw RangeError("time " + format_double(t) + " outside [0, " + format_double(path.t_end) + "]");
    }
    Vec x = path.x0;
    for (std::size_t i = 0; i < path.jump_times.size() && path.jump_times[i] <= t; ++i) x += path.jump_vectors[i];
    return x;
}

Simulator::Simulator(KernelSpec kernel, SimConfig config, const StateGrid& grid, const Vec& x0)
    : kernel_(std::move(kernel)), config_(config), x0_(x0)
{
    config_.validate();
    std::vector<Vec> probes;
    if (!kernel_.state_independent()) probes = grid.points;
    probes.push_back(x0_);
    init(probes);
}

Simulator::Simulator(KernelSpec kernel, SimConfig config, const Vec& x0)
    : Simulator(kernel, config, StateGrid::defaults(kernel.dim()), x0)
{
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;

std::uint64_t Simulator::path_seed(std::size_t index) const noexcept
{
    return substream_seed(config_.base_seed, index);
}

namespace {

double component_rate(const ComponentPlan& c, int d, const Vec& x, double eps)
{
    if (c.state_free) return c.fixed_rate;
    if (c.hunt) return std::get<HuntDifference>(c.radial).c(x) * c.table.total * c.geom->angular_mass;
    return radial_moment(c.radial, *c.geom, d, x, 0, eps, kInf).value * c.geom->angular_mass;
}

// (small, total) variance of one component at x.
std::pair<double, double> component_variance(const ComponentPlan& c, int d, const Vec& x, double eps)
{
    if (c.atomic) return {c.small_var_atoms, c.total_var_atoms};
    if (c.hunt) {
        const double cx = std::get<HuntDifference>(c.radial).c(x) * c.geom->angular_mass;
        return {cx * c.hunt_small, cx * c.hunt_total};
    }
    const double small = radial_moment(c.radial, *c.geom, d, x, 2, 0.0, eps).value;
    const double total = small + radial_moment(c.radial, *c.geom, d, x, 2, eps, kInf).value;
    return {small * c.geom->angular_mass, total * c.geom->angular_mass};
}

double sample_radius(const ComponentPlan& c, int d, const Vec& x, double eps, Rng& rng)
{
    return std::visit(
        [&](const auto& comp) -> double {
            using T = std::decay_t<decltype(comp)>;
            if constexpr (std::is_same_v<T, StableLikeSmall>) {
                const double alpha = comp.alpha(x);
                const double top = std::pow(eps, -alpha) - 1.0;
                return std::pow(1.0 + rng.uniform() * top, -1.0 / alpha);
            } else if constexpr (std::is_same_v<T, BigJumpPowerLaw>) {
                const double a = std::max(eps, 1.0);
                return a * std::pow(rng.uniform_pos(), -1.0 / comp.beta1(x));
            } else if constexpr (std::is_same_v<T, BigJumpStretchedExp>) {
                const double a = std::max(eps, 1.0);
                const double beta = comp.beta2(x);
                const double shape = d / beta;
                const double q0 = boost::math::gamma_q(shape, comp.lambda * std::pow(a, beta));
                const double v = boost::math::gamma_q_inv(shape, rng.uniform_pos() * q0);
                return std::max(a, std::pow(v / comp.lambda, 1.0 / beta));
            } else {
                return c.table.sample(comp, rng);
            }
        },
        c.radial);
}

Vec sample_jump(const ComponentPlan& c, int d, const Vec& x, double eps, Rng& rng)
{
    if (c.atomic) {
        const double target = rng.uniform() * c.cumulative.back();
        auto it = std::upper_bound(c.cumulative.begin(), c.cumulative.end(), target);
        if (it == c.cumulative.end()) --it;
        return c.atoms[static_cast<std::size_t>(it - c.cumulative.begin())].z;
    }
    const double r = sample_radius(c, d, x, eps, rng);
    Vec dir = uniform_direction(d, rng);
    if (c.cone) {
        int tries = 0;
        while (!c.cone->contains(dir)) {
            if (++tries > 1'000'000) throw DomainError("cone direction sampler: acceptance too small");
            dir = uniform_direction(d, rng);
        }
    }
    return r * dir;
}

// Lower Cholesky factor of a symmetric positive semi-definite matrix.
Matrix3 cholesky(const Matrix3& a, int d)
{
    Matrix3 l{};
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                l[i][i] = s > 0.0 ? std::sqrt(s) : 0.0;
            } else {
                l[i][j] = l[j][j] > 0.0 ? s / l[j][j] : 0.0;
            }
        }
    }
    return l;
}

}  // namespace

void Simulator::init(const std::vector<Vec>& probe_points)
{
    if (x0_.dim() != kernel_.dim()) throw DomainError("x0 dimension does not match the kernel");
    plan_ = std::make_unique<Plan>();
    const int d = kernel_.dim();
    const double eps = config_.epsilon;
    for (std::size_t i = 0; i < kernel_.components().size(); ++i) {
        const KernelComponent& comp = kernel_.components()[i];
        ComponentPlan c;
        c.geom = &kernel_.geometry(i);
        c.state_free = c.geom->state_free;
        if (const auto* atoms = std::get_if<CompoundPoissonAtoms>(&comp)) {
            c.atomic = true;
            c.state_free = true;
            double acc = 0.0;
            for (const Atom& a : atoms->atoms) {
                const double r2 = a.z.norm_sq();
                c.total_var_atoms += a.weight * r2;
                if (a.z.norm() < eps) {
                    c.small_var_atoms += a.weight * r2;
                    continue;
                }
                if (a.weight == 0.0) continue;
                acc += a.weight;
                c.atoms.push_back(a);
                c.cumulative.push_back(acc);
            }
            c.fixed_rate = acc;
            plan_->components.push_back(std::move(c));
            continue;
        }
        if (const auto* cone = std::get_if<ConeRestriction>(&comp)) {
            c.radial = cone->base;
            c.cone = &cone->cone;
        } else {
            std::visit(
                [&](const auto& v) {
                    if constexpr (!std::is_same_v<std::decay_t<decltype(v)>, CompoundPoissonAtoms> &&
                                  !std::is_same_v<std::decay_t<decltype(v)>, ConeRestriction>) {
                        c.radial = v;
                    }
                },
                comp);
        }
        if (c.geom->angular_mass == 0.0) {
            c.state_free = true;
            c.fixed_rate = 0.0;
            plan_->components.push_back(std::move(c));
            continue;
        }
        if (const auto* h = std::get_if<HuntDifference>(&c.radial)) {
            c.hunt = true;
            c.table.build(*h, eps, c.geom->hunt_alpha_infinity);
            auto f = [&](double r) { return std::pow(r, 1.0 - h->alpha_r.at_radius(r)); };
            try {
                c.hunt_small = quad::integrate_radial(f, 0.0, eps, 1.0 - c.geom->hunt_alpha_origin).value;
            } catch (const Error&) {
                c.hunt_small = kInf;
            }
            c.hunt_total = c.geom->hunt_second_radial ? *c.geom->hunt_second_radial : kInf;
        }
        if (c.state_free) {
            c.state_free = false;
            c.fixed_rate = component_rate(c, d, x0_, eps);
            c.state_free = true;
        }
        plan_->components.push_back(std::move(c));
    }

    plan_->state_free = kernel_.state_independent();
    double sup = 0.0;
    for (const Vec& x : probe_points) sup = std::max(sup, jump_rate(x));
    rate_bound_ = config_.dominating_rate_margin * sup;
    if (plan_->state_free) plan_->fixed_rate = jump_rate(x0_);

    if (plan_->state_free) {
        double small = 0.0, total = 0.0;
        try {
            for (const auto& c : plan_->components) {
                const auto [s, t] = component_variance(c, d, x0_, eps);
                small += s;
                total += t;
            }
        } catch (const Error&) {
            total = kInf;
        }
        plan_->fixed_fraction = total > 0.0 && std::isfinite(total) ? small / total : 0.0;
        plan_->variance_known = std::isfinite(total);
        if (config_.small_jump_mode == SmallJumpMode::gaussian_substitute) {
            plan_->fixed_small = small_jump_matrix(kernel_, x0_, eps).a;
        }
    }
}

double Simulator::jump_rate(const Vec& x) const
{
    if (plan_->state_free && plan_->fixed_rate > 0.0) return plan_->fixed_rate;
    double rate = 0.0;
    for (const auto& c : plan_->components) rate += component_rate(c, kernel_.dim(), x, config_.epsilon);
    return rate;
}

TruncationReport Simulator::stream_path(std::size_t index, const JumpSink& sink, Vec* final_state) const
{
    const int d = kernel_.dim();
    const double eps = config_.epsilon;
    const bool gaussian = config_.small_jump_mode == SmallJumpMode::gaussian_substitute;
    Rng rng(path_seed(index));
    Vec x = x0_;
    double t = 0.0;
    double last_event = 0.0;
    std::size_t records = 0;

    auto fraction_at = [&](const Vec& s) -> double {
        if (plan_->state_free) return plan_->fixed_fraction;
        double small = 0.0, total = 0.0;
        try {
            for (const auto& c : plan_->components) {
                const auto [a, b] = component_variance(c, d, s, eps);
                small += a;
                total += b;
            }
        } catch (const Error&) {
            return 0.0;
        }
        return total > 0.0 && std::isfinite(total) ? small / total : 0.0;
    };
    auto gaussian_increment = [&](const Vec& s, double dt) {
        const Matrix3 cov = plan_->state_free ? plan_->fixed_small : small_jump_matrix(kernel_, s, eps).a;
        const Matrix3 l = cholesky(cov, d);
        double g[kMaxDim];
        for (int i = 0; i < d; ++i) g[i] = rng.normal();
        Vec inc(d);
        const double scale = std::sqrt(dt);
        for (int i = 0; i < d; ++i) {
            double v = 0.0;
            for (int k = 0; k <= i; ++k) v += l[i][k] * g[k];
            inc[i] = scale * v;
        }
        return inc;
    };
    auto emit = [&](double time, const Vec& z) {
        if (++records > config_.max_jumps) {
            throw JumpCapExceeded("jump cap " + std::to_string(config_.max_jumps) + " reached at t = " +
                                  format_double(time));
        }
        sink(time, z);
    };

    double frac = fraction_at(x);
    double frac_integral = 0.0;
    double frac_since = 0.0;
    const double bound = rate_bound_;
    if (bound > 0.0 || gaussian) {
        for (;;) {
            if (bound > 0.0) {
                t += rng.exponential(bound);
            } else {
                t = kInf;
            }
            if (t > config_.t_end) break;
            const double rate = jump_rate(x);
            if (rate > bound * (1.0 + 1e-12)) {
                throw EnvelopeViolation("jump rate " + format_double(rate) + " exceeds dominating rate " +
                                        format_double(bound) + " at t = " + format_double(t));
            }
            const bool accept = rng.uniform() * bound < rate;
            Vec z = Vec::zero(d);
            if (gaussian) {
                z = gaussian_increment(x, t - last_event);
                last_event = t;
            }
            if (accept) {
                double pick = rng.uniform() * rate;
                const ComponentPlan* chosen = nullptr;
                for (const auto& c : plan_->components) {
                    const double rc = component_rate(c, d, x, eps);
                    if (rc <= 0.0) continue;
                    chosen = &c;
                    if (pick < rc) break;
                    pick -= rc;
                }
                z += sample_jump(*chosen, d, x, eps, rng);
            }
            if (accept || gaussian) {
                emit(t, z);
                if (!plan_->state_free) {
                    frac_integral += frac * (t - frac_since);
                    frac_since = t;
                }
                x += z;
                if (!plan_->state_free) frac = fraction_at(x);
            }
        }
        if (gaussian && config_.t_end > last_event) {
            const Vec z = gaussian_increment(x, config_.t_end - last_event);
            emit(config_.t_end, z);
            x += z;
        }
    }
    TruncationReport report;
    if (plan_->state_free) {
        report.dropped_variance_fraction = plan_->fixed_fraction;
    } else {
        frac_integral += frac * (config_.t_end - frac_since);
        report.dropped_variance_fraction = frac_integral / config_.t_end;
    }
    if (final_state) *final_state = x;
    return report;
}

Path Simulator::simulate_path(std::size_t index) const
{
    Path p;
    p.x0 = x0_;
    p.t_end = config_.t_end;
    p.seed = path_seed(index);
    p.approximate = config_.small_jump_mode == SmallJumpMode::gaussian_substitute;
    p.truncation = stream_path(index, [&](double time, const Vec& z) {
        p.jump_times.push_back(time);
        p.jump_vectors.push_back(z);
    });
    return p;
}

PathEnsemble Simulator::simulate_ensemble(std::size_t n_paths, unsigned jobs) const
{
    if (n_paths == 0) throw DomainError("n_paths must be positive");
    PathEnsemble ens;
    ens.config = config_;
    ens.kernel_id = kernel_.id();
    ens.paths.resize(n_paths);
    ens.seeds.resize(n_paths);
    std::vector<std::exception_ptr> errors(n_paths);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n_paths;) {
            try {
                ens.paths[i] = simulate_path(i);
                ens.seeds[i] = ens.paths[i].seed;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n_paths)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < n_paths; ++i) {
        if (!errors[i]) continue;
        const std::string prefix = "path " + std::to_string(i) + ": ";
        try {
            std::rethrow_exception(errors[i]);
        } catch (const EnvelopeViolation& e) {
            throw EnvelopeViolation(prefix + e.what());
        } catch (const JumpCapExceeded& e) {
            throw JumpCapExceeded(prefix + e.what());
        }
    }
    return ens;
}

Path simulate_path(const KernelSpec& kernel, const Vec& x0, const SimConfig& config, std::size_t path_index)
{
    return Simulator(kernel, config, x0).simulate_path(path_index);
}

PathEnsemble simulate_ensemble(const KernelSpec& kernel, const Vec& x0, const SimConfig& config, std::size_t n_paths,
                               unsigned jobs)
{
    return Simulator(kernel, config, x0).simulate_ensemble(n_paths, jobs);
}

double auto_epsilon(const KernelSpec& kernel, const StateGrid& grid, double target)
{
    grid.validate();
    const std::vector<Vec> points =
        kernel.state_independent() ? std::vector<Vec>{grid.points.front()} : grid.points;
    for (int k = 1; k <= 30; ++k) {
        const double eps = std::ldexp(1.0, -k);
        bool ok = true;
        for (const Vec& x : points) {
            const double total = diffusion_matrix(kernel, x).trace();
            const double small = small_jump_matrix(kernel, x, eps).trace();
            if (total > 0.0 && small > target * total) {
                ok = false;
                break;
            }
        }
        if (ok) return eps;
    }
    throw DomainError("no epsilon >= 2^-30 meets the dropped-variance target");
}

}  // namespace jumplab
