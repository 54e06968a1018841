// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "jumplab/error.hpp"
#include "jumplab/quadrature.hpp"
#include "jumplab/sym_eigen.hpp"
#include "parallel.hpp"

namespace jumplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix3 subtract(const Matrix3& a, const Matrix3& b)
{
    Matrix3 out{};
    for (int i = 0; i < kMaxDim; ++i)
        for (int j = 0; j < kMaxDim; ++j) out[i][j] = a[i][j] - b[i][j];
    return out;
}

void require_paths(const PathEnsemble& e)
{
    if (e.paths.empty()) throw DomainError("ensemble is empty");
}

int ensemble_dim(const PathEnsemble& e) { return e.paths.front().x0.dim(); }

}  // namespace

SecondMomentField::SecondMomentField(const KernelSpec& kernel, double truncation_eps)
    : kernel_(kernel), eps_(truncation_eps)
{
    if (kernel.state_independent()) {
        const Vec x = Vec::zero(kernel.dim());
        fixed_full_ = diffusion_matrix(kernel, x).a;
        fixed_tail_ = eps_ > 0.0 ? subtract(fixed_full_, small_jump_matrix(kernel, x, eps_).a) : fixed_full_;
        fixed_ = true;
    }
}

double SecondMomentField::truncation_for(const SimConfig& config)
{
    return config.small_jump_mode == SmallJumpMode::drop ? config.epsilon : 0.0;
}

Matrix3 SecondMomentField::full_at(const Vec& x) const
{
    return fixed_ ? fixed_full_ : diffusion_matrix(kernel_, x).a;
}

Matrix3 SecondMomentField::at(const Vec& x) const
{
    if (fixed_) return fixed_tail_;
    const Matrix3 full = diffusion_matrix(kernel_, x).a;
    return eps_ > 0.0 ? subtract(full, small_jump_matrix(kernel_, x, eps_).a) : full;
}

MartingaleReport martingale_test(const PathEnsemble& ensemble, double t)
{
    require_paths(ensemble);
    const int d = ensemble_dim(ensemble);
    MartingaleReport rep;
    rep.t = t;
    rep.n_paths = ensemble.paths.size();
    std::vector<double> values(ensemble.paths.size());
    rep.pass = true;
    for (int i = 0; i < d; ++i) {
        for (std::size_t p = 0; p < ensemble.paths.size(); ++p) {
            const Path& path = ensemble.paths[p];
            values[p] = state_at(path, t)[i] - path.x0[i];
        }
        rep.coordinates.push_back(mean_se(values));
        rep.pass = rep.pass && std::fabs(rep.coordinates.back().z_score()) <= 3.0;
    }
    return rep;
}

MomentIdentityReport second_moment_identity(const PathEnsemble& ensemble, const KernelSpec& kernel, double t,
                                            unsigned jobs)
{
    require_paths(ensemble);
    const int d = ensemble_dim(ensemble);
    const std::size_t n = ensemble.paths.size();
    const SecondMomentField field(kernel, SecondMomentField::truncation_for(ensemble.config));
    std::vector<double> lhs(n * d), rhs(n * d), rhs_full(n * d), dropped(n);
    detail::parallel_for(n, jobs, [&](std::size_t p) {
        const Path& path = ensemble.paths[p];
        const Vec disp = state_at(path, t) - path.x0;
        for (int i = 0; i < d; ++i) {
            lhs[p * d + i] = disp[i] * disp[i];
            if (field.state_free()) {
                // a constant in x integrates to a t; summing a dt piecewise would round
                rhs[p * d + i] = field.at(path.x0)[i][i] * t;
                rhs_full[p * d + i] = field.full_at(path.x0)[i][i] * t;
            } else {
                rhs[p * d + i] = integrate_along(path, t, [&](const Vec& x) { return field.at(x)[i][i]; });
                rhs_full[p * d + i] = integrate_along(path, t, [&](const Vec& x) { return field.full_at(x)[i][i]; });
            }
        }
        dropped[p] = path.truncation.dropped_variance_fraction;
    });
    MomentIdentityReport rep;
    rep.t = t;
    rep.pass = true;
    std::vector<double> column(n), diff(n);
    for (int i = 0; i < d; ++i) {
        auto pick = [&](const std::vector<double>& src) {
            for (std::size_t p = 0; p < n; ++p) column[p] = src[p * d + i];
            return mean_se(column).mean;
        };
        const double l = pick(lhs), r = pick(rhs), rf = pick(rhs_full);
        for (std::size_t p = 0; p < n; ++p) diff[p] = lhs[p * d + i] - rhs[p * d + i];
        const MeanEstimate m = mean_se(diff);
        rep.lhs.push_back(l);
        rep.rhs.push_back(r);
        rep.rhs_full.push_back(rf);
        rep.difference.push_back(m);
        rep.relative_difference.push_back(r != 0.0 ? (l - r) / r : (l == 0.0 ? 0.0 : kInf));
        rep.pass = rep.pass && std::fabs(m.z_score()) <= 3.0;
    }
    rep.mean_dropped_variance_fraction = mean_se(dropped).mean;
    return rep;
}

std::vector<double> realized_qv(const Path& path, double t)
{
    const int d = path.x0.dim();
    std::vector<double> q(static_cast<std::size_t>(d * d), 0.0);
    for (std::size_t k = 0; k < path.jump_times.size() && path.jump_times[k] <= t; ++k) {
        const Vec& z = path.jump_vectors[k];
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) q[i * d + j] += z[i] * z[j];
    }
    return q;
}

std::vector<double> predictable_qv(const Path& path, double t, const SecondMomentField& field)
{
    const int d = path.x0.dim();
    std::vector<double> q(static_cast<std::size_t>(d * d), 0.0);
    if (field.state_free()) {
        const Matrix3 a = field.at(path.x0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) q[i * d + j] = a[i][j] * t;
        return q;
    }
    Vec x = path.x0;
    double last = 0.0;
    auto add = [&](double dt) {
        if (dt <= 0.0) return;
        const Matrix3 a = field.at(x);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) q[i * d + j] += a[i][j] * dt;
    };
    for (std::size_t k = 0; k < path.jump_times.size() && path.jump_times[k] <= t; ++k) {
        add(path.jump_times[k] - last);
        last = path.jump_times[k];
        x += path.jump_vectors[k];
    }
    add(t - last);
    return q;
}

QVReport qv_comparison(const PathEnsemble& ensemble, const KernelSpec& kernel, double t, unsigned jobs)
{
    require_paths(ensemble);
    const int d = ensemble_dim(ensemble);
    const std::size_t n = ensemble.paths.size(), dd = static_cast<std::size_t>(d * d);
    const SecondMomentField field(kernel, SecondMomentField::truncation_for(ensemble.config));
    std::vector<double> realized(n * dd), predictable(n * dd);
    detail::parallel_for(n, jobs, [&](std::size_t p) {
        const auto r = realized_qv(ensemble.paths[p], t);
        const auto q = predictable_qv(ensemble.paths[p], t, field);
        std::copy(r.begin(), r.end(), realized.begin() + static_cast<std::ptrdiff_t>(p * dd));
        std::copy(q.begin(), q.end(), predictable.begin() + static_cast<std::ptrdiff_t>(p * dd));
    });
    QVReport rep;
    rep.t = t;
    rep.d = d;
    rep.pass = true;
    std::vector<double> diff(n), col(n);
    for (std::size_t e = 0; e < dd; ++e) {
        for (std::size_t p = 0; p < n; ++p) diff[p] = realized[p * dd + e] - predictable[p * dd + e];
        rep.difference.push_back(mean_se(diff));
        for (std::size_t p = 0; p < n; ++p) col[p] = realized[p * dd + e];
        rep.realized_mean.push_back(mean_se(col).mean);
        for (std::size_t p = 0; p < n; ++p) col[p] = predictable[p * dd + e];
        rep.predictable_mean.push_back(mean_se(col).mean);
        rep.pass = rep.pass && std::fabs(rep.difference.back().z_score()) <= 3.0;
    }
    for (std::size_t p = 0; p < n; ++p) {
        rep.realized_00.push_back(realized[p * dd]);
        rep.predictable_00.push_back(predictable[p * dd]);
    }
    return rep;
}

double apply_generator(const KernelSpec& kernel, const TestFunction& u, const Vec& x, double eps)
{
    if (x.dim() != kernel.dim()) throw DomainError("state dimension does not match the kernel");
    if (u.is_constant()) return 0.0;
    const int d = kernel.dim();
    const double ux = u.value(x);
    const Vec grad = u.gradient(x);
    auto bracket = [&](const Vec& z) {
        double v = u.value(x + z) - ux;
        if (z.norm() < 1.0) v -= dot(grad, z);
        return v;
    };
    quad::Options opts;
    opts.rel_tol = 1e-7;
    opts.abs_tol = 1e-12;

    double total = 0.0;
    for (std::size_t i = 0; i < kernel.components().size(); ++i) {
        const KernelComponent& comp = kernel.components()[i];
        if (const auto* atoms = std::get_if<CompoundPoissonAtoms>(&comp)) {
            for (const Atom& a : atoms->atoms)
                if (a.z.norm() >= eps) total += a.weight * bracket(a.z);
            continue;
        }
        const ComponentGeometry& geom = kernel.geometry(i);
        if (geom.angular_mass == 0.0) continue;
        const Cone* cone = nullptr;
        RadialComponent rc;
        if (const auto* c = std::get_if<ConeRestriction>(&comp)) {
            rc = c->base;
            cone = &c->cone;
        } else {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (!std::is_same_v<T, CompoundPoissonAtoms> && !std::is_same_v<T, ConeRestriction>) {
                        rc = v;
                    }
                },
                comp);
        }
        // Near the origin the bracket is O(r^2); far away it is bounded.
        double near_exp = kNaN, tail_exp = kNaN, lo = 0.0, hi = kInf, cut = kInf;
        // Pure power profiles k r^-p are fixed once per x; others go through radial_density.
        double k = 0.0, p = 0.0;
        bool power_profile = true;
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, StableLikeSmall>) {
                    const double a = v.alpha(x);
                    near_exp = 1.0 - a;
                    hi = 1.0;
                    k = v.c(x) * (v.bass_normalized ? bass_constant(a, d).value : 1.0);
                    p = d + a;
                } else if constexpr (std::is_same_v<T, BigJumpPowerLaw>) {
                    lo = 1.0;
                    const double b = v.beta1(x);
                    tail_exp = -1.0 - b;
                    k = v.c0(x);
                    p = d + b;
                } else if constexpr (std::is_same_v<T, BigJumpStretchedExp>) {
                    lo = 1.0;
                    cut = std::max(2.0, std::pow(800.0 / v.lambda, 1.0 / v.beta2(x)));
                    power_profile = false;
                } else {
                    near_exp = 1.0 - geom.hunt_alpha_origin;
                    tail_exp = -1.0 - geom.hunt_alpha_infinity;
                    power_profile = false;
                }
            },
            rc);
        auto F = [&](const Vec& z) {
            const double r = z.norm();
            if (cone && !cone->contains((1.0 / r) * z)) return 0.0;
            const double rho = power_profile ? k * std::pow(r, -p) : radial_density(rc, d, x, r);
            return rho == 0.0 ? 0.0 : bracket(z) * rho;
        };
        lo = std::max(lo, eps);
        // Split at 1 where the compensator switches off.
        if (lo < 1.0 && hi > 1.0) {
            total += quad::integrate_shell(F, d, lo, 1.0, near_exp, kNaN, opts).value;
            lo = 1.0;
        }
        if (!(hi > lo)) continue;
        if (std::isinf(hi) && std::isfinite(cut)) {
            if (cut > lo) total += quad::integrate_shell(F, d, lo, cut, kNaN, kNaN, opts).value;
        } else if (std::isinf(hi)) {
            // The mapped tail oscillates without end; past R its size is tiny, so an
            // absolute tolerance there stops the subdivision early.
            const double R = std::max(64.0, 8.0 * lo);
            total += quad::integrate_shell(F, d, lo, R, near_exp, kNaN, opts).value;
            quad::Options far = opts;
            far.abs_tol = 1e-10;
            total += quad::integrate_shell(F, d, R, hi, kNaN, tail_exp, far).value;
        } else {
            total += quad::integrate_shell(F, d, lo, hi, near_exp, tail_exp, opts).value;
        }
    }
    return total;
}

GeneratorReport generator_martingale_test(const PathEnsemble& ensemble, const KernelSpec& kernel,
                                          const TestFunction& u, double t, unsigned jobs)
{
    require_paths(ensemble);
    const std::size_t n = ensemble.paths.size();
    const double eps = SecondMomentField::truncation_for(ensemble.config);
    std::vector<double> m(n, 0.0);
    if (!u.is_constant()) {
        detail::parallel_for(n, jobs, [&](std::size_t p) {
            const Path& path = ensemble.paths[p];
            const double integral =
                integrate_along(path, t, [&](const Vec& x) { return apply_generator(kernel, u, x, eps); });
            m[p] = u.value(state_at(path, t)) - u.value(path.x0) - integral;
        });
    }
    GeneratorReport rep;
    rep.t = t;
    rep.function = u.name();
    rep.martingale = mean_se(m);
    rep.pass = std::fabs(rep.martingale.z_score()) <= 3.0;
    return rep;
}

std::vector<double> dyadic_checkpoints(double t_end)
{
    std::vector<double> out;
    const double start = std::exp(std::numbers::e);
    for (double t = start; t <= t_end; t *= 2.0) out.push_back(t);
    return out;
}

namespace {

// Streams jump records of one path and evaluates W and R at the checkpoints.
class LilAccumulator {
public:
    LilAccumulator(const Vec& x0, const Vec& direction, const std::vector<double>& checkpoints,
                   const SecondMomentField& field)
        : x0_(x0), x_(x0), dir_(direction), cps_(checkpoints), field_(field),
          w_(checkpoints.size(), kNaN), r_(checkpoints.size(), kNaN)
    {
        q_ = rate(x_);
    }

    void jump(double time, const Vec& z)
    {
        flush(time, false);
        v_ += q_ * (time - last_);
        last_ = time;
        x_ += z;
        q_ = rate(x_);
    }

    void finish(double t_end) { flush(t_end, true); }

    const std::vector<double>& w() const { return w_; }
    const std::vector<double>& r() const { return r_; }

private:
    double rate(const Vec& x) const
    {
        const Matrix3 a = field_.at(x);
        double s = 0.0;
        for (int i = 0; i < x.dim(); ++i)
            for (int j = 0; j < x.dim(); ++j) s += dir_[i] * a[i][j] * dir_[j];
        return s;
    }

    // Evaluates checkpoints strictly before `time` (or up to it when inclusive).
    void flush(double time, bool inclusive)
    {
        while (next_ < cps_.size() && (cps_[next_] < time || (inclusive && cps_[next_] <= time))) {
            const double t = cps_[next_];
            const double v = v_ + q_ * (t - last_);
            const Vec disp = x_ - x0_;
            if (v > std::numbers::e) w_[next_] = dot(disp, dir_) / std::sqrt(2.0 * v * std::log(std::log(v)));
            r_[next_] = disp.norm() / std::sqrt(2.0 * t * std::log(std::log(t)));
            ++next_;
        }
    }

    Vec x0_, x_, dir_;
    const std::vector<double>& cps_;
    const SecondMomentField& field_;
    std::vector<double> w_, r_;
    std::size_t next_ = 0;
    double v_ = 0.0, q_ = 0.0, last_ = 0.0;
};

void check_lil_options(const LILOptions& o, int d)
{
    if (o.checkpoints.empty()) throw DomainError("LIL needs at least one checkpoint");
    const double floor = std::exp(std::numbers::e);
    for (std::size_t k = 0; k < o.checkpoints.size(); ++k) {
        if (o.checkpoints[k] < floor * (1.0 - 1e-15)) {
            throw RangeError("LIL checkpoint below e^e: " + std::to_string(o.checkpoints[k]));
        }
        if (k > 0 && !(o.checkpoints[k] > o.checkpoints[k - 1])) throw DomainError("checkpoints must increase");
    }
    if (o.direction.dim() != d || std::fabs(o.direction.norm() - 1.0) > 1e-12) {
        throw DomainError("LIL direction must be a unit vector of the kernel dimension");
    }
}

LILReport summarize(const LILOptions& o, std::size_t n, const std::vector<double>& w, const std::vector<double>& r)
{
    const std::size_t m = o.checkpoints.size();
    LILReport rep;
    rep.checkpoints = o.checkpoints;
    rep.lambda_hat = o.lambda_hat;
    rep.Lambda_hat = o.Lambda_hat;
    rep.band_lo = o.band.kappa_lo * std::sqrt(std::max(0.0, o.lambda_hat));
    rep.band_hi = o.band.kappa_hi * std::sqrt(std::max(0.0, o.Lambda_hat));
    rep.tail_moment_floor = o.tail_moment_floor;
    rep.tail_moment_floor_sqrt = std::sqrt(std::max(0.0, o.tail_moment_floor));
    rep.n_paths = n;
    std::size_t inside = 0;
    std::vector<double> live_w;
    for (std::size_t p = 0; p < n; ++p) {
        double mw = -kInf, mr = 0.0;
        bool degenerate = false;
        for (std::size_t k = 0; k < m; ++k) {
            const double wv = w[p * m + k];
            if (std::isnan(wv)) {
                degenerate = true;
            } else {
                mw = std::max(mw, std::fabs(wv));
            }
            mr = std::max(mr, r[p * m + k]);
        }
        rep.max_abs_w.push_back(std::isfinite(mw) ? mw : kNaN);
        rep.max_r.push_back(mr);
        if (degenerate) {
            ++rep.degenerate_paths;
            continue;
        }
        live_w.push_back(mw);
        if (mw >= rep.band_lo && mw <= rep.band_hi) ++inside;
    }
    if (o.keep_trajectories) {
        rep.w = w;
        rep.r = r;
    }
    rep.coverage = live_w.empty() ? 0.0 : static_cast<double>(inside) / static_cast<double>(live_w.size());
    rep.max_abs_w_median = live_w.empty() ? kNaN : quantile(live_w, 0.5);
    rep.max_r_median = quantile(rep.max_r, 0.5);
    rep.max_r_q05 = quantile(rep.max_r, 0.05);
    rep.max_r_q95 = quantile(rep.max_r, 0.95);
    const bool radial_ok = rep.max_r_median >= 0.5 * std::sqrt(std::max(0.0, o.lambda_hat)) &&
                           rep.max_r_median <= 1.5 * std::sqrt(std::max(0.0, o.Lambda_hat));
    rep.pass = !live_w.empty() && rep.coverage >= o.required_coverage && radial_ok;
    return rep;
}

}  // namespace

LILReport lil_statistics(const PathEnsemble& ensemble, const KernelSpec& kernel, const LILOptions& options,
                         unsigned jobs)
{
    require_paths(ensemble);
    check_lil_options(options, kernel.dim());
    const std::size_t n = ensemble.paths.size(), m = options.checkpoints.size();
    if (options.checkpoints.back() > ensemble.config.t_end) throw RangeError("LIL checkpoint beyond t_end");
    const SecondMomentField field(kernel, SecondMomentField::truncation_for(ensemble.config));
    std::vector<double> w(n * m), r(n * m);
    detail::parallel_for(n, jobs, [&](std::size_t p) {
        const Path& path = ensemble.paths[p];
        LilAccumulator acc(path.x0, options.direction, options.checkpoints, field);
        for (std::size_t k = 0; k < path.jump_times.size(); ++k) acc.jump(path.jump_times[k], path.jump_vectors[k]);
        acc.finish(path.t_end);
        std::copy(acc.w().begin(), acc.w().end(), w.begin() + static_cast<std::ptrdiff_t>(p * m));
        std::copy(acc.r().begin(), acc.r().end(), r.begin() + static_cast<std::ptrdiff_t>(p * m));
    });
    return summarize(options, n, w, r);
}

LILReport lil_statistics_streaming(const Simulator& simulator, std::size_t n_paths, const LILOptions& options,
                                   unsigned jobs)
{
    if (n_paths == 0) throw DomainError("n_paths must be positive");
    check_lil_options(options, simulator.kernel().dim());
    if (options.checkpoints.back() > simulator.config().t_end) throw RangeError("LIL checkpoint beyond t_end");
    const std::size_t m = options.checkpoints.size();
    const SecondMomentField field(simulator.kernel(), SecondMomentField::truncation_for(simulator.config()));
    std::vector<double> w(n_paths * m), r(n_paths * m);
    detail::parallel_for(n_paths, jobs, [&](std::size_t p) {
        LilAccumulator acc(simulator.x0(), options.direction, options.checkpoints, field);
        simulator.stream_path(p, [&](double time, const Vec& z) { acc.jump(time, z); });
        acc.finish(simulator.config().t_end);
        std::copy(acc.w().begin(), acc.w().end(), w.begin() + static_cast<std::ptrdiff_t>(p * m));
        std::copy(acc.r().begin(), acc.r().end(), r.begin() + static_cast<std::ptrdiff_t>(p * m));
    });
    return summarize(options, n_paths, w, r);
}

LILConstants lil_constants(const KernelSpec& kernel, const StateGrid& grid, double truncation_eps)
{
    grid.validate();
    const SecondMomentField field(kernel, truncation_eps);
    const std::vector<Vec> points = field.state_free() ? std::vector<Vec>{grid.points.front()} : grid.points;
    LILConstants c;
    c.lambda_hat = kInf;
    c.Lambda_hat = -kInf;
    std::array<double, kMaxDim> diag_min;
    diag_min.fill(kInf);
    for (const Vec& x : points) {
        const auto ev = symmetric_eigenvalues(field.at(x), kernel.dim());
        c.lambda_hat = std::min(c.lambda_hat, ev[0]);
        c.Lambda_hat = std::max(c.Lambda_hat, ev[kernel.dim() - 1]);
        const Matrix3 full = field.full_at(x);
        for (int i = 0; i < kernel.dim(); ++i) diag_min[i] = std::min(diag_min[i], full[i][i]);
    }
    c.tail_moment_floor = *std::max_element(diag_min.begin(), diag_min.begin() + kernel.dim());
    return c;
}

}  // namespace jumplab
