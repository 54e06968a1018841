// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

#include "jumplab/error.hpp"
#include "jumplab/simd.hpp"

namespace jumplab::quad {

namespace {

// Kronrod 15 abscissae (positive half, descending) and weights; Gauss 7 weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    int depth;
};

struct ByError {
    bool operator()(const Segment& x, const Segment& y) const noexcept
    {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;
    }
};

// One GK15 panel with the QUADPACK error heuristic.
Segment gk15(const RadialFn& f, double a, double b, int depth)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::fabs(resk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double mean = resk * 0.5;
    double resasc = kWgk[7] * std::fabs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::fabs(fv1[j] - mean) + std::fabs(fv2[j] - mean));
    resasc *= std::fabs(half);
    resabs *= std::fabs(half);
    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(eps * 50.0 * resabs, err);
    return Segment{a, b, resk * half, err, depth};
}

// Global adaptive bisection. Reports the stage with the smallest total error
// seen, so a tighter tolerance (a longer run of the same deterministic
// refinement sequence) can never report a larger bound.
QuadratureResult adaptive(const RadialFn& f, double a, double b, const Options& opts)
{
    std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
    std::vector<Segment> frozen;  // too narrow to split further
    Segment first = gk15(f, a, b, 0);
    heap.push(first);
    double value = first.value;
    double error = first.error;
    std::size_t evals = 15;

    double best_value = value;
    double best_error = error;

    auto tolerance = [&](double v) { return std::max(opts.abs_tol, opts.rel_tol * std::fabs(v)); };

    while (error > tolerance(value) && !heap.empty()) {
        if (evals + 30 > opts.max_evaluations) break;
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-15 * std::max(1.0, std::fabs(worst.a))) {
            frozen.push_back(worst);
            continue;
        }
        Segment left = gk15(f, worst.a, mid, worst.depth + 1);
        Segment right = gk15(f, mid, worst.b, worst.depth + 1);
        evals += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if (!std::isfinite(value)) {
            throw DivergentIntegral("DivergenceDetected: non-finite quadrature estimate");
        }
        if (error < best_error) {
            best_error = error;
            best_value = value;
        }
    }
    QuadratureResult out{best_value, best_error, evals};
    if (best_error > tolerance(best_value)) {
        std::ostringstream os;
        os << "ToleranceNotMet: error bound " << best_error << " for estimate " << best_value << " after " << evals
           << " evaluations";
        throw ToleranceNotMet(os.str(), best_value, best_error);
    }
    return out;
}

// Integral of f over (0, b] with f ~ r^p near 0.
QuadratureResult near_origin(const RadialFn& f, double b, double p, const Options& opts)
{
    if (!std::isnan(p)) {
        if (p <= -1.0) {
            std::ostringstream os;
            os << "DivergenceDetected: integrand ~ r^" << p << " is not integrable at the origin";
            throw DivergentIntegral(os.str());
        }
        const double scale = 1.0 / (p + 1.0);
        auto g = [&](double t) {
            const double omt = 1.0 - t;
            const double r = b * std::exp(-scale * (t / omt));
            if (r == 0.0) return 0.0;
            const double v = f(r) * scale * r / (omt * omt);
            return std::isfinite(v) ? v : 0.0;
        };
        return adaptive(g, 0.0, 1.0, opts);
    }

    // Unknown exponent: integrate h(s) = f(b e^{-s}) b e^{-s} over dyadic
    // panels [0,1], [1,2], [2,4], ... and watch the running total.
    auto h = [&](double s) {
        const double r = b * std::exp(-s);
        if (r == 0.0) return 0.0;
        return f(r) * r;
    };
    QuadratureResult total{0.0, 0.0, 0};
    std::vector<double> running;
    int quiet = 0;
    double s0 = 0.0, s1 = 1.0;
    const int span = opts.divergence_levels;
    for (; s0 < 700.0; s0 = s1, s1 *= 2.0) {
        Options panel = opts;
        panel.abs_tol = std::max(opts.abs_tol, 0.1 * opts.rel_tol * std::fabs(total.value));
        const QuadratureResult pr = adaptive(h, s0, s1, panel);
        total += pr;
        running.push_back(total.value);
        const int k = static_cast<int>(running.size()) - 1;
        if (k >= span && std::fabs(running[k - span]) > 0.0 &&
            std::fabs(running[k]) > opts.divergence_ratio * std::fabs(running[k - span])) {
            bool growing = true;
            for (int j = k - span + 1; j <= k; ++j)
                if (!(std::fabs(running[j]) > 1.2 * std::fabs(running[j - 1]))) growing = false;
            if (growing) {
                std::ostringstream os;
                os << "DivergenceDetected: estimate grew from " << running[k - span] << " to " << running[k]
                   << " over " << span << " refinement levels";
                throw DivergentIntegral(os.str());
            }
        }
        if (std::fabs(pr.value) <= opts.rel_tol * std::fabs(total.value)) {
            if (++quiet >= 2) return total;
        } else {
            quiet = 0;
        }
    }
    throw DivergentIntegral("DivergenceDetected: radial integral did not settle before underflow");
}

}  // namespace

QuadratureResult integrate_interval(const RadialFn& f, double a, double b, const Options& opts)
{
    if (!(b > a)) return QuadratureResult{0.0, 0.0, 1};
    return adaptive(f, a, b, opts);
}

QuadratureResult integrate_radial(const RadialFn& f, double r_lo, double r_hi, double singular_exponent,
                                  const Options& opts, double tail_exponent)
{
    if (r_lo < 0.0 || !(r_hi > r_lo)) throw DomainError("integrate_radial: need 0 <= r_lo < r_hi");
    QuadratureResult total{0.0, 0.0, 0};
    double lo = r_lo;
    const bool infinite = std::isinf(r_hi);
    if (lo == 0.0) {
        const double b = infinite ? 1.0 : std::min(r_hi, 1.0);
        total += near_origin(f, b, singular_exponent, opts);
        lo = b;
    }
    if (infinite) {
        // Tail: r = 1/u maps [a, inf) onto (0, 1/a] with integrand f(1/u)/u^2 ~ u^{-q-2}.
        const double a = std::max(lo, 1.0);
        if (a > lo) total += adaptive(f, lo, a, opts);
        const double q = tail_exponent;
        if (!std::isnan(q) && q >= -1.0) {
            std::ostringstream os;
            os << "DivergenceDetected: integrand ~ r^" << q << " is not integrable at infinity";
            throw DivergentIntegral(os.str());
        }
        auto h = [&](double u) { return f(1.0 / u) / (u * u); };
        total += near_origin(h, 1.0 / a, std::isnan(q) ? q : -q - 2.0, opts);
    } else if (r_hi > lo) {
        total += adaptive(f, lo, r_hi, opts);
    }
    return total;
}

double sphere_area(int d)
{
    switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw DomainError("dimension must be 1, 2 or 3");
    }
}

int default_sphere_resolution(int d)
{
    return d == 2 ? 64 : 16;
}

void gauss_legendre(int n, double* nodes, double* weights)
{
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

namespace {

double circle_rule(const DirectionFn& g, int n, std::size_t& evals)
{
    std::vector<double> values(n);
    const double h = 2.0 * std::numbers::pi / n;
    for (int k = 0; k < n; ++k) {
        const double th = (k + 0.5) * h;
        values[k] = g(Vec{std::cos(th), std::sin(th)});
    }
    evals += n;
    return h * simd::sum(values);
}

double sphere_rule(const DirectionFn& g, int n, std::size_t& evals)
{
    std::vector<double> z(n), w(n);
    gauss_legendre(n, z.data(), w.data());
    const int m = 2 * n;
    const double h = 2.0 * std::numbers::pi / m;
    std::vector<double> rings(n);
    std::vector<double> values(m);
    for (int i = 0; i < n; ++i) {
        const double s = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
        for (int k = 0; k < m; ++k) {
            const double ph = (k + 0.5) * h;
            values[k] = g(Vec{s * std::cos(ph), s * std::sin(ph), z[i]});
        }
        rings[i] = h * simd::sum(values);
    }
    evals += static_cast<std::size_t>(n) * m;
    return simd::dot(w, rings);
}

}  // namespace

QuadratureResult integrate_sphere(const DirectionFn& g, int d, int resolution)
{
    if (resolution <= 0) resolution = default_sphere_resolution(d);
    QuadratureResult res;
    switch (d) {
    case 1:
        res.value = g(Vec{1.0}) + g(Vec{-1.0});
        res.evaluations = 2;
        return res;
    case 2: {
        res.value = circle_rule(g, resolution, res.evaluations);
        const double coarse = circle_rule(g, std::max(2, resolution / 2), res.evaluations);
        res.error_bound = std::fabs(res.value - coarse);
        return res;
    }
    case 3: {
        res.value = sphere_rule(g, resolution, res.evaluations);
        const double coarse = sphere_rule(g, std::max(1, resolution / 2), res.evaluations);
        res.error_bound = std::fabs(res.value - coarse);
        return res;
    }
    default: throw DomainError("dimension must be 1, 2 or 3");
    }
}

QuadratureResult integrate_shell(const DirectionFn& F, int d, double r_lo, double r_hi, double singular_exponent,
                                 double tail_exponent, const Options& opts, int sphere_resolution)
{
    auto radial = [&](double r) {
        auto g = [&](const Vec& theta) { return F(r * theta); };
        return std::pow(r, d - 1) * integrate_sphere(g, d, sphere_resolution).value;
    };
    return integrate_radial(radial, r_lo, r_hi, singular_exponent, opts, tail_exponent);
}

}  // namespace jumplab::quad
