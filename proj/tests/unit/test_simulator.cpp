// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "jumplab/error.hpp"
#include "jumplab/rng.hpp"
#include "jumplab/simulator.hpp"
#include "jumplab/stats.hpp"

using namespace jumplab;

namespace {

SimConfig cfg(double t_end, double eps, std::uint64_t seed = 1)
{
    SimConfig c;
    c.t_end = t_end;
    c.epsilon = eps;
    c.base_seed = seed;
    return c;
}

bool same(const Path& a, const Path& b)
{
    if (a.jump_times != b.jump_times || a.jump_vectors.size() != b.jump_vectors.size()) return false;
    for (std::size_t i = 0; i < a.jump_vectors.size(); ++i)
        if (!(a.jump_vectors[i] == b.jump_vectors[i])) return false;
    return a.seed == b.seed && a.truncation.dropped_variance_fraction == b.truncation.dropped_variance_fraction;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("config validation")
{
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.epsilon = 1.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = {};
    c.t_end = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = {};
    c.dominating_rate_margin = 0.9;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = {};
    c.max_jumps = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("seed mixing")
{
    CHECK(substream_seed(1, 0) != substream_seed(1, 1));
    CHECK(substream_seed(1, 0) != substream_seed(2, 0));
    CHECK(substream_seed(7, 9) == substream_seed(7, 9));
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(9);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform_pos();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("null kernel gives a constant path")
{
    const auto p = simulate_path(fx::null_kernel(), Vec{1.5}, cfg(10, 0.1), 0);
    CHECK(p.jump_times.empty());
    CHECK(p.final_state() == Vec{1.5});
}

TEST_CASE("path invariants")
{
    Simulator sim(fx::index_family(2), cfg(5, 0.05), StateGrid::uniform(2, -5, 5, 11), Vec{0.0, 0.0});
    for (std::size_t i = 0; i < 20; ++i) {
        const auto p = sim.simulate_path(i);
        REQUIRE(p.jump_times.size() == p.jump_vectors.size());
        for (std::size_t k = 0; k < p.jump_times.size(); ++k) {
            CHECK(p.jump_times[k] > 0.0);
            CHECK(p.jump_times[k] <= 5.0);
            if (k) CHECK(p.jump_times[k] > p.jump_times[k - 1]);
            CHECK(p.jump_vectors[k].norm() >= 0.05);
        }
        CHECK(p.truncation.dropped_variance_fraction >= 0.0);
        CHECK(p.truncation.dropped_variance_fraction < 0.1);
        CHECK_FALSE(p.approximate);
    }
}

TEST_CASE("state_at")
{
    Path p;
    p.x0 = Vec{1.0};
    p.t_end = 1.0;
    p.jump_times = {0.3, 0.6};
    p.jump_vectors = {Vec{2.0}, Vec{-0.5}};
    CHECK(state_at(p, 0.0) == Vec{1.0});
    CHECK(state_at(p, 0.3) == Vec{3.0});
    CHECK(state_at(p, 0.5) == Vec{3.0});
    CHECK(state_at(p, 1.0) == Vec{2.5});
    CHECK_THROWS_AS(state_at(p, -0.1), RangeError);
    CHECK_THROWS_AS(state_at(p, 1.1), RangeError);
}

TEST_CASE("compound Poisson jump count")
{
    const auto ens = simulate_ensemble(fx::atoms_pm(0.5), Vec{0.0}, cfg(1, 0.1, 3), 10000);
    std::vector<double> counts;
    for (const auto& p : ens.paths) counts.push_back(static_cast<double>(p.jump_times.size()));
    const auto m = mean_se(counts);
    CHECK(std::fabs(m.mean - 2.0) <= 3 * m.se);
}

TEST_CASE("determinism and worker independence")
{
    const auto k = fx::index_family(1);
    Simulator sim(k, cfg(2, 0.05, 77), Vec{0.3});
    CHECK(same(sim.simulate_path(4), sim.simulate_path(4)));
    const auto a = sim.simulate_ensemble(64, 1);
    const auto b = sim.simulate_ensemble(64, 4);
    REQUIRE(a.paths.size() == 64);
    for (std::size_t i = 0; i < 64; ++i) CHECK(same(a.paths[i], b.paths[i]));
    CHECK(a.seeds == b.seeds);
    const auto one = sim.simulate_ensemble(1);
    CHECK(same(one.paths[0], sim.simulate_path(0)));
    // streamed records equal stored ones
    const auto p = sim.simulate_path(9);
    std::vector<double> times;
    Vec fin;
    sim.stream_path(9, [&](double t, const Vec&) { times.push_back(t); }, &fin);
    CHECK(times == p.jump_times);
    CHECK(fin == p.final_state());
}

TEST_CASE("compound Poisson variance over 1e5 paths")
{
    const auto ens = simulate_ensemble(fx::atoms_pm(0.5), Vec{0.0}, cfg(1, 0.1, 11), 100000, 2);
    std::vector<double> x;
    for (const auto& p : ens.paths) x.push_back(p.final_state()[0]);
    const auto m = mean_se(x);
    const double var = m.se * m.se * static_cast<double>(m.n);
    CHECK(std::fabs(var - 0.5) <= 0.01 * 0.5);
}

TEST_CASE("envelope violation and jump cap")
{
    // rate grows with |x|; a tiny grid undersizes the bound
    const KernelSpec k(1, {BigJumpPowerLaw{CoefficientFn::parse("1 + |x|^2"), fx::k(3.0)}});
    SimConfig c = cfg(50, 0.1, 1);
    c.dominating_rate_margin = 1.0;
    Simulator sim(k, c, StateGrid::uniform(1, -0.01, 0.01, 3), Vec{0.0});
    bool violated = false;
    for (std::size_t i = 0; i < 50 && !violated; ++i) {
        try {
            sim.simulate_path(i);
        } catch (const EnvelopeViolation&) {
            violated = true;
        }
    }
    CHECK(violated);
    SimConfig capped = cfg(100, 0.1);
    capped.max_jumps = 5;
    CHECK_THROWS_AS(simulate_path(fx::atoms_pm(0.5), Vec{0.0}, capped, 0), JumpCapExceeded);
    CHECK_THROWS_AS(simulate_ensemble(fx::atoms_pm(0.5), Vec{0.0}, capped, 3), JumpCapExceeded);
}

TEST_CASE("dropped variance fraction decreases with eps")
{
    const KernelSpec k(1, {fx::stable(1, 1.2), fx::power(1, 3)});
    double prev = 1.0;
    for (double e : {0.1, 0.05, 0.01}) {
        const auto p = simulate_path(k, Vec{0.0}, cfg(1, e), 0);
        CHECK(p.truncation.dropped_variance_fraction < prev);
        prev = p.truncation.dropped_variance_fraction;
    }
    const double e = auto_epsilon(fx::index_family(1), StateGrid::uniform(1, -3, 3, 7), 0.01);
    CHECK(e > 0.0);
    CHECK(e < 0.1);
    const double t = auto_epsilon(k, StateGrid{1, {Vec{0.0}}, {0.5}}, 0.01);
    // dropped fraction of this kernel at eps: 2 eps^0.8 / 0.8 / (2/0.8 + 2)
    auto frac = [](double x) { return 2 * std::pow(x, 0.8) / 0.8 / (2 / 0.8 + 2); };
    CHECK(frac(t) <= 0.01);
    CHECK(frac(2 * t) > 0.01);
}

TEST_CASE("gaussian substitute marks paths approximate")
{
    SimConfig c = cfg(1, 0.1);
    c.small_jump_mode = SmallJumpMode::gaussian_substitute;
    const auto p = simulate_path(KernelSpec(1, {fx::stable(1, 1)}), Vec{0.0}, c, 0);
    CHECK(p.approximate);
    CHECK_FALSE(p.jump_times.empty());
    // variance of the substituted part: 2 eps t = 0.2
    const auto ens = simulate_ensemble(KernelSpec(1, {fx::stable(1, 1)}), Vec{0.0}, c, 20000);
    std::vector<double> x;
    for (const auto& q : ens.paths) x.push_back(q.final_state()[0]);
    const auto m = mean_se(x);
    const double var = m.se * m.se * static_cast<double>(m.n);
    CHECK(var == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("samplers match radial laws")
{
    // stable-like alpha = 1 on [eps, 1): P(|z| > r) = (1/r - 1) / (1/eps - 1)
    const auto ens = simulate_ensemble(KernelSpec(1, {fx::stable(1, 1)}), Vec{0.0}, cfg(5, 0.1, 2), 4000);
    std::vector<double> r;
    for (const auto& p : ens.paths)
        for (const auto& z : p.jump_vectors) r.push_back(std::fabs(z[0]));
    std::vector<double> ref;
    Rng g(99);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double u = g.uniform();
        ref.push_back(1.0 / (1.0 + u * 9.0));
    }
    CHECK(ks_two_sample(r, ref).p_value > 0.001);

    // stretched exponential beta = 1: |z| - 1 ~ Exp(1)
    const KernelSpec se(1, {BigJumpStretchedExp{fx::k(1.0), 1.0, fx::k(1.0)}});
    const auto e2 = simulate_ensemble(se, Vec{0.0}, cfg(5, 0.1, 3), 2000);
    std::vector<double> s, sref;
    for (const auto& p : e2.paths)
        for (const auto& z : p.jump_vectors) s.push_back(std::fabs(z[0]));
    for (std::size_t i = 0; i < s.size(); ++i) sref.push_back(1.0 + g.exponential(1.0));
    CHECK(ks_two_sample(s, sref).p_value > 0.001);

    // Hunt alpha(r) = 1 below 1 and 3 above, c = 1, d = 1, eps = 0.5:
    // mass on [0.5, 1) is 2, on [1, inf) is 2/3
    const KernelSpec h(1, {HuntDifference{fx::k(1.0), CoefficientFn::radial_step(1.0, 3.0, 1.0)}});
    const auto e3 = simulate_ensemble(h, Vec{0.0}, cfg(5, 0.5, 4), 2000);
    std::vector<double> hr, href;
    for (const auto& p : e3.paths)
        for (const auto& z : p.jump_vectors) hr.push_back(std::fabs(z[0]));
    for (std::size_t i = 0; i < hr.size(); ++i) {
        const double u = g.uniform() * (2.0 + 2.0 / 3.0);
        href.push_back(u < 2.0 ? 1.0 / (2.0 - u / 2.0) : std::pow(1.0 - (u - 2.0) * 1.5, -1.0 / 3.0));
    }
    CHECK(ks_two_sample(hr, href).p_value > 0.001);
}

TEST_CASE("cone sampler stays in the cone")
{
    Cone c{expr::parse("x[0] - 0.5"), false, false};
    const KernelSpec k(2, {ConeRestriction{fx::power(1, 3), c}});
    const auto ens = simulate_ensemble(k, Vec{0.0, 0.0}, cfg(3, 0.1), 50);
    std::size_t n = 0;
    for (const auto& p : ens.paths)
        for (const auto& z : p.jump_vectors) {
            CHECK(z[0] / z.norm() > 0.5);
            CHECK(z.norm() >= 1.0);
            ++n;
        }
    CHECK(n > 0);
}

}
