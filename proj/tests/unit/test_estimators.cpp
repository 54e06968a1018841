// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "jumplab/error.hpp"
#include "jumplab/estimators.hpp"

using namespace jumplab;

namespace {

SimConfig cfg(double t_end, double eps, std::uint64_t seed)
{
    SimConfig c;
    c.t_end = t_end;
    c.epsilon = eps;
    c.base_seed = seed;
    return c;
}

const double kEe = std::exp(std::numbers::e);

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("martingale test")
{
    const auto null_ens = simulate_ensemble(fx::null_kernel(), Vec{0.0}, cfg(1, 0.1, 1), 100);
    const auto a = martingale_test(null_ens, 1.0);
    CHECK(a.coordinates[0].mean == 0.0);
    CHECK(a.pass);

    const auto cp = simulate_ensemble(fx::atoms_pm(0.5), Vec{0.0}, cfg(1, 0.1, 2), 100000);
    const auto b = martingale_test(cp, 1.0);
    CHECK(std::fabs(b.coordinates[0].mean) <= 3 * b.coordinates[0].se);
    CHECK(b.coordinates[0].se == doctest::Approx(std::sqrt(0.5 / 1e5)).epsilon(0.02));
    CHECK(b.pass);

    const auto os = simulate_ensemble(fx::one_sided(), Vec{0.0}, cfg(1, 0.1, 3), 10000);
    const auto c = martingale_test(os, 1.0);
    CHECK(c.coordinates[0].mean == doctest::Approx(0.5).epsilon(0.1));
    CHECK_FALSE(c.pass);
}

TEST_CASE("second moment identity")
{
    const auto null_ens = simulate_ensemble(fx::null_kernel(), Vec{0.0}, cfg(1, 0.1, 1), 100);
    const auto z = second_moment_identity(null_ens, fx::null_kernel(), 1.0);
    CHECK(z.lhs[0] == 0.0);
    CHECK(z.rhs[0] == 0.0);

    const auto cp = simulate_ensemble(fx::atoms_pm(0.5), Vec{0.0}, cfg(1, 0.1, 4), 20000);
    const auto r = second_moment_identity(cp, fx::atoms_pm(0.5), 1.0);
    CHECK(r.rhs[0] == 0.5);
    CHECK(r.rhs_full[0] == 0.5);
    CHECK(std::fabs(r.difference[0].mean) <= 3 * r.difference[0].se);
    CHECK(r.pass);

    const KernelSpec s(1, {fx::stable(1, 1)});
    const auto se = simulate_ensemble(s, Vec{0.0}, cfg(1, 0.01, 5), 20000);
    const auto q = second_moment_identity(se, s, 1.0);
    CHECK(q.rhs_full[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(q.rhs[0] == doctest::Approx(2.0 - 0.02).epsilon(1e-12));
    CHECK(q.mean_dropped_variance_fraction == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(std::fabs(q.lhs[0] - q.rhs[0]) <= 0.05 * q.rhs[0]);
}

TEST_CASE("quadratic variation")
{
    Path p;
    p.x0 = Vec{0.0, 0.0};
    p.t_end = 1.0;
    p.jump_times = {0.25};
    p.jump_vectors = {Vec{0.3, -2.0}};
    const auto rq = realized_qv(p, 1.0);
    CHECK(rq[0] == 0.3 * 0.3);
    CHECK(rq[1] == 0.3 * -2.0);
    CHECK(rq[3] == 4.0);
    CHECK(realized_qv(p, 0.2)[0] == 0.0);

    const auto k = fx::atoms_pm(0.5);
    const SecondMomentField f(k, 0.0);
    const auto cp = simulate_ensemble(k, Vec{0.0}, cfg(2, 0.1, 6), 10000);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(predictable_qv(cp.paths[i], 1.0, f)[0] == 0.5);
        CHECK(predictable_qv(cp.paths[i], 2.0, f)[0] == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto r = qv_comparison(cp, k, 1.0);
    CHECK(std::fabs(r.difference[0].mean) <= 3 * r.difference[0].se);
    CHECK(r.pass);
    CHECK(r.realized_00.size() == cp.paths.size());
}

TEST_CASE("qv scaling under z -> 2z")
{
    const auto k = fx::atoms_pm(0.5);
    const auto k2 = scale_atoms(k, 2.0);
    const auto e1 = simulate_ensemble(k, Vec{0.0}, cfg(1, 0.1, 8), 200);
    const auto e2 = simulate_ensemble(k2, Vec{0.0}, cfg(1, 0.1, 8), 200);
    const SecondMomentField f1(k, 0.0), f2(k2, 0.0);
    for (std::size_t i = 0; i < 200; ++i) {
        REQUIRE(e1.paths[i].jump_times == e2.paths[i].jump_times);
        CHECK(realized_qv(e2.paths[i], 1.0)[0] == 4 * realized_qv(e1.paths[i], 1.0)[0]);
        CHECK(predictable_qv(e2.paths[i], 1.0, f2)[0] == 4 * predictable_qv(e1.paths[i], 1.0, f1)[0]);
    }
}

TEST_CASE("predictable QV is linear in t for state-free kernels")
{
    const auto k = fx::stable_plus_power();
    const SecondMomentField f(k, 0.0);
    CHECK(f.state_free());
    const auto p = simulate_path(k, Vec{0.0}, cfg(4, 0.1, 9), 0);
    for (double t : {0.5, 1.0, 2.0, 4.0}) CHECK(predictable_qv(p, t, f)[0] == doctest::Approx(4.0 * t).epsilon(1e-13));
}

TEST_CASE("generator")
{
    const auto k = fx::atoms_pm(0.5);
    for (double x : {-3.0, 0.0, 0.7, 10.0})
        CHECK(apply_generator(k, TestFunction::by_name("square1"), Vec{x}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(apply_generator(k, TestFunction::by_name("constant"), Vec{0.3}) == 0.0);
    CHECK(std::fabs(apply_generator(fx::stable_plus_power(), TestFunction::by_name("sin1"), Vec{0.0})) < 1e-12);
    // sin at x for the atoms: sum w [sin(x+z) - sin x] = 2 sin x (cos 0.5 - 1)
    CHECK(apply_generator(k, TestFunction::by_name("sin1"), Vec{0.4}) ==
          doctest::Approx(2 * std::sin(0.4) * (std::cos(0.5) - 1)).epsilon(1e-13));
    // stable alpha = 1, u = cos: int_{|z|<1} (cos z - 1) z^{-2} dz, closed form via Si
    // = 2 [ -cos 1 + 1 - Si(1) ] with Si(1) = 0.946083070367183
    const double si1 = 0.946083070367183;
    CHECK(apply_generator(KernelSpec(1, {fx::stable(1, 1)}), TestFunction::by_name("cos1"), Vec{0.0}) ==
          doctest::Approx(2 * (1 - std::cos(1.0) - si1)).epsilon(1e-8));
    CHECK_THROWS(TestFunction::by_name("nope"));
}

TEST_CASE("generator martingale")
{
    const auto k = fx::atoms_pm(0.5);
    const auto cp = simulate_ensemble(k, Vec{0.0}, cfg(1, 0.1, 10), 10000);
    const auto c = generator_martingale_test(cp, k, TestFunction::by_name("constant"), 1.0);
    CHECK(c.martingale.mean == 0.0);
    CHECK(c.martingale.se == 0.0);
    CHECK(c.pass);
    const auto s = generator_martingale_test(cp, k, TestFunction::by_name("sin1"), 1.0);
    CHECK(std::fabs(s.martingale.mean) <= 3 * s.martingale.se);
    const auto null_ens = simulate_ensemble(fx::null_kernel(), Vec{0.2}, cfg(1, 0.1, 1), 100);
    const auto n = generator_martingale_test(null_ens, fx::null_kernel(), TestFunction::by_name("sin1"), 1.0);
    CHECK(n.martingale.mean == 0.0);
}

TEST_CASE("LIL checkpoints and guards")
{
    const auto cps = dyadic_checkpoints(1000.0);
    CHECK(cps.front() == kEe);
    CHECK(cps.back() <= 1000.0);
    CHECK(cps.size() == 7);

    const auto ens = simulate_ensemble(fx::null_kernel(), Vec{0.0}, cfg(100, 0.1, 1), 10);
    LILOptions o;
    o.direction = Vec{1.0};
    o.checkpoints = {10.0};
    CHECK_THROWS_AS(lil_statistics(ens, fx::null_kernel(), o), RangeError);
    o.checkpoints = dyadic_checkpoints(100.0);
    const auto rep = lil_statistics(ens, fx::null_kernel(), o);
    CHECK(rep.degenerate_paths == 10);
    for (double r : rep.max_r) CHECK(r == 0.0);
}

TEST_CASE("LIL denominators at e^e")
{
    // one path, one jump of +3 at t = 1, atoms kernel with a = 0.5
    const auto k = fx::atoms_pm(0.5);
    PathEnsemble e;
    e.config = cfg(kEe, 0.1, 0);
    Path p;
    p.x0 = Vec{0.0};
    p.t_end = kEe;
    p.jump_times = {1.0};
    p.jump_vectors = {Vec{3.0}};
    e.paths = {p};
    LILOptions o;
    o.direction = Vec{1.0};
    o.checkpoints = {kEe};
    const auto rep = lil_statistics(e, k, o);
    CHECK(rep.r[0] == doctest::Approx(3.0 / std::sqrt(2 * kEe)).epsilon(1e-14));
    const double v = 0.5 * kEe;
    CHECK(rep.w[0] == doctest::Approx(3.0 / std::sqrt(2 * v * std::log(std::log(v)))).epsilon(1e-14));
}

TEST_CASE("LIL constants")
{
    const auto k = fx::atoms_pm(0.5, 2.0);
    const auto c = lil_constants(k, StateGrid::uniform(1, -1, 1, 3), 0.1);
    CHECK(c.lambda_hat == 1.0);
    CHECK(c.Lambda_hat == 1.0);
    CHECK(c.tail_moment_floor == 1.0);
    const KernelSpec s(1, {StableLikeSmall{CoefficientFn::decaying_bump(1.0, 1.0), fx::k(1.0), false}});
    const auto d = lil_constants(s, StateGrid::uniform(1, -10, 10, 201), 0.1);
    CHECK(d.Lambda_hat == doctest::Approx(2.0 * 1.8).epsilon(1e-12));
    CHECK(d.tail_moment_floor == doctest::Approx(2.0 * (1 + 1.0 / 101)).epsilon(1e-12));
}

TEST_CASE("LIL streaming equals stored")
{
    const auto k = fx::atoms_pm(0.5, 2.0);
    Simulator sim(k, cfg(200, 0.1, 12), Vec{0.0});
    LILOptions o;
    o.direction = Vec{1.0};
    o.checkpoints = dyadic_checkpoints(200);
    o.band = {0.5, 1.5};
    o.lambda_hat = o.Lambda_hat = 1.0;
    const auto a = lil_statistics(sim.simulate_ensemble(40), k, o, 1);
    const auto b = lil_statistics_streaming(sim, 40, o, 3);
    CHECK(a.w == b.w);
    CHECK(a.r == b.r);
    CHECK(a.coverage == b.coverage);
}

TEST_CASE("generator of a Hunt kernel with an expression index")
{
    // The index is an expression, so it must never be evaluated at r = inf.
    const auto alpha = CoefficientFn::from_expr(expr::parse("1 + 2*step(r - 1)", expr::Domain::radial));
    const KernelSpec h(1, {HuntDifference{fx::k(1.0), alpha}});
    const auto u = TestFunction::by_name("cos1");
    // 2 [int_0^1 (cos z - 1) z^-2 dz + int_1^inf (cos z - 1) z^-4 dz], composite Simpson
    auto simpson = [](auto f, double a, double b, int n) {
        const double hh = (b - a) / n;
        double s = f(a) + f(b);
        for (int i = 1; i < n; ++i) s += f(a + i * hh) * (i % 2 ? 4.0 : 2.0);
        return s * hh / 3.0;
    };
    auto near = [](double z) { return z < 1e-4 ? -0.5 + z * z / 24.0 : (std::cos(z) - 1.0) / (z * z); };
    auto far = [](double z) { return (std::cos(z) - 1.0) / (z * z * z * z); };
    const double oracle = 2.0 * (simpson(near, 0.0, 1.0, 2000) + simpson(far, 1.0, 2001.0, 2000000) -
                                 1.0 / (3.0 * 2001.0 * 2001.0 * 2001.0));
    const double got = apply_generator(h, u, Vec{0.0});
    CHECK(std::isfinite(got));
    CHECK(got == doctest::Approx(oracle).epsilon(1e-7));
}

}
