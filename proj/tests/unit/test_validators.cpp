// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "jumplab/error.hpp"
#include "jumplab/validators.hpp"

using namespace jumplab;

namespace {

KernelSpec bump_stable(int d = 1)
{
    return KernelSpec(d, {StableLikeSmall{CoefficientFn::decaying_bump(1.0, 1.0), fx::k(1.0), false}});
}

}  // namespace

TEST_SUITE("validators") {

TEST_CASE("grid defaults")
{
    const auto g1 = StateGrid::defaults(1);
    CHECK(g1.points.size() == 201);
    CHECK(g1.points.front()[0] == -10.0);
    CHECK(g1.points.back()[0] == 10.0);
    CHECK(g1.pair_radii.size() == 12);
    CHECK(g1.pair_radii.front() == 0.5);
    CHECK(StateGrid::defaults(2).points.size() == 41 * 41);
    CHECK(StateGrid::defaults(3).points.size() == 41 * 41 * 41);
    StateGrid bad = g1;
    bad.pair_radii = {0.1, 0.2};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad.points.clear();
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("second moment check")
{
    const auto g = StateGrid::defaults(1);
    const auto a = check_second_moment(fx::stable_plus_power(), g);
    CHECK(a.verdict == Verdict::pass);
    CHECK(a.find("sup").value() == doctest::Approx(4.0).epsilon(1e-12));
    const auto b = check_second_moment(KernelSpec(1, {fx::power(1, 1.5)}), g);
    CHECK(b.verdict == Verdict::fail);
    CHECK(b.witness.has_value());
    const auto c = check_second_moment(fx::atoms_pm(0.5, 1.5), g);
    CHECK(c.verdict == Verdict::pass);
    CHECK(c.find("sup").value() == 0.75);
}

TEST_CASE("zero drift check")
{
    const auto g = StateGrid::defaults(1);
    const auto a = check_zero_drift(fx::stable_plus_power(), g, {1.0, 0.1});
    CHECK(a.verdict == Verdict::pass);
    CHECK(a.find("max_abs").value() == 0.0);
    const auto b = check_zero_drift(fx::one_sided(), g, {1.0});
    CHECK(b.verdict == Verdict::fail);
    CHECK(b.witness_value == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(b.witness);
    // the witness reproduces
    CHECK(drift_tail(fx::one_sided(), *b.witness, 1.0).value[0] == doctest::Approx(b.witness_value).epsilon(1e-14));
    Cone sym{expr::parse("|x[0]| - 0.5"), true, false};
    const KernelSpec c(2, {ConeRestriction{fx::power(1, 3), sym}});
    CHECK(check_zero_drift(c, StateGrid::uniform(2, -1, 1, 3), {1.0}).verdict == Verdict::pass);
}

TEST_CASE("envelope check")
{
    const auto g = StateGrid::defaults(1);
    const auto k = bump_stable();
    const EnvelopePair good(KernelSpec(1, {fx::stable(1, 1)}), KernelSpec(1, {fx::stable(2, 1)}));
    CHECK(check_envelopes(k, good, g).verdict != Verdict::fail);
    const EnvelopePair low(KernelSpec(1, {fx::stable(1, 1)}), KernelSpec(1, {fx::stable(1.5, 1)}));
    const auto r = check_envelopes(k, low, g);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.witness.has_value());
    const EnvelopePair null_low(KernelSpec(1, {}), KernelSpec(1, {fx::stable(2, 1)}));
    CHECK(check_envelopes(k, null_low, g).verdict == Verdict::fail);
}

TEST_CASE("ellipticity check")
{
    EllipticityBounds b;
    const KernelSpec iso(2, {fx::stable(1, 1)});
    const double s = second_moment(iso, Vec{0.0, 0.0}).value;
    const auto r = check_ellipticity(iso, StateGrid::uniform(2, -1, 1, 3), 1e-9, &b);
    CHECK(r.verdict == Verdict::pass);
    CHECK(b.lambda == doctest::Approx(s / 2).epsilon(1e-14));
    CHECK(b.Lambda == doctest::Approx(s / 2).epsilon(1e-14));

    const auto r1 = check_ellipticity(bump_stable(), StateGrid::defaults(1), 1e-9, &b);
    CHECK(r1.verdict == Verdict::pass);
    // base moment m = 2, c ranges over [1 + 1/101, 2] on the grid
    CHECK(b.lambda == doctest::Approx(2.0 * (1 + 1.0 / 101)).epsilon(1e-12));
    CHECK(b.Lambda == doctest::Approx(4.0).epsilon(1e-12));

    const auto r2 = check_ellipticity(fx::axis_d2(), StateGrid::uniform(2, -1, 1, 3), 1e-9, &b);
    CHECK(r2.verdict == Verdict::fail);
    CHECK(std::fabs(b.lambda) < 1e-12);
    CHECK(r2.witness.has_value());
}

TEST_CASE("index regularity")
{
    const auto g = StateGrid::defaults(1);
    const auto a = check_index_regularity(fx::k(1.0), g);
    CHECK(a.verdict == Verdict::pass);
    for (double w : modulus_of_continuity(fx::k(1.0), g)) CHECK(w == 0.0);

    const auto lip = CoefficientFn::decaying_bump(1.0, 0.5);
    CHECK(check_index_regularity(lip, g).verdict == Verdict::pass);
    const auto plain = CoefficientFn::parse("1 + 0.5/(1+|x|^2)");
    const auto b = check_index_regularity(plain, g);
    CHECK(b.verdict == Verdict::advisory);
    const auto w = modulus_of_continuity(plain, g);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] <= 0.33 * g.pair_radii[i] + 1e-15);

    CHECK(check_index_regularity(CoefficientFn::parse("1.5 + 0.6/(1+|x|^2)"), g).verdict == Verdict::fail);
}

TEST_CASE("big jump conditions")
{
    const auto g = StateGrid::defaults(1);
    const KernelSpec a(1, {BigJumpPowerLaw{fx::k(1.0), CoefficientFn::parse("3 + 0.5/(1+|x|^2)")}});
    const auto ra = check_big_jump_conditions(a, 0, g);
    CHECK(ra.verdict != Verdict::fail);
    CHECK(ra.find("exponent_inf").value() == doctest::Approx(3.0 + 0.5 / 101).epsilon(1e-14));
    const KernelSpec b(1, {fx::power(1.0, 2.0)});
    const auto rb = check_big_jump_conditions(b, 0, g);
    CHECK(rb.verdict == Verdict::fail);
    CHECK(rb.witness.has_value());
    const KernelSpec c(1, {BigJumpStretchedExp{fx::k(1.0), 1.0, fx::k(0.7)}});
    CHECK(check_big_jump_conditions(c, 0, g).verdict != Verdict::fail);
}

TEST_CASE("hunt conditions")
{
    const auto g = StateGrid::defaults(1);
    const KernelSpec a(1, {HuntDifference{fx::k(1.0), CoefficientFn::radial_step(1.0, 3.0, 1.0)}});
    const auto ra = check_hunt_conditions(a, 0, g);
    CHECK(ra.verdict != Verdict::fail);
    CHECK(ra.find("integrable_0").value() == doctest::Approx(2.0).epsilon(1e-8));
    const KernelSpec b(1, {HuntDifference{CoefficientFn::decaying_bump(1.0, 1.0), CoefficientFn::radial_step(1.0, 3.0, 1.0)}});
    CHECK(check_hunt_conditions(b, 0, g).verdict != Verdict::fail);
    const KernelSpec c(1, {HuntDifference{fx::k(1.0), CoefficientFn::constant(1.0, expr::Domain::radial)}});
    CHECK(check_hunt_conditions(c, 0, g).verdict == Verdict::fail);
}

TEST_CASE("cone symmetry audit")
{
    CHECK(check_cone_symmetry(Cone{expr::parse("|x[0]| - 0.5"), true, false}, 2).verdict == Verdict::pass);
    CHECK(check_cone_symmetry(Cone{expr::parse("x[0]"), true, false}, 2).verdict == Verdict::fail);
    CHECK(check_cone_symmetry(Cone{expr::parse("x[0]*x[1]*x[2]"), false, true}, 3).verdict == Verdict::pass);
    CHECK(check_cone_symmetry(Cone{expr::parse("x[0] - 0.2"), false, true}, 3).verdict == Verdict::fail);
}

TEST_CASE("full suite on the state-dependent index family")
{
    for (int d = 1; d <= 2; ++d) {
        const auto rep = validate_all(fx::index_family(d), StateGrid::defaults(d));
        CHECK_FALSE_MESSAGE(rep.any_fail(), rep.to_text());
        CHECK(rep.point_rows.size() == rep.grid_points);
        CHECK(rep.to_csv().find("second_moment") != std::string::npos);
        for (const auto& c : rep.checks) CHECK_FALSE(c.assumption.empty());
    }
}

TEST_CASE("fail verdicts carry witnesses")
{
    const auto rep = validate_all(fx::one_sided(), StateGrid::defaults(1));
    CHECK(rep.any_fail());
    for (const auto& c : rep.checks)
        if (c.verdict == Verdict::fail) CHECK_MESSAGE(c.witness.has_value(), c.name);
}

TEST_CASE("refinement never turns fail into pass")
{
    // a narrow spike that only the fine grid sees
    const auto alpha = CoefficientFn::parse("1 + 1.2*exp(-(x[0]-0.05)^2*400)");
    const auto coarse = StateGrid::uniform(1, -1, 1, 5);
    const auto fine = StateGrid::uniform(1, -1, 1, 41);
    const auto a = check_index_regularity(alpha, coarse);
    const auto b = check_index_regularity(alpha, fine);
    CHECK(a.verdict != Verdict::fail);
    CHECK(b.verdict == Verdict::fail);
    StateGrid both = fine;
    both.points.insert(both.points.end(), coarse.points.begin(), coarse.points.end());
    CHECK(check_index_regularity(alpha, both).verdict == Verdict::fail);
}

TEST_CASE("report serialization")
{
    const auto rep = validate_all(fx::stable_plus_power(), StateGrid::uniform(1, -1, 1, 3));
    const auto txt = rep.to_text();
    CHECK(txt.find("[check second_moment]") != std::string::npos);
    CHECK(txt.find("verdict = pass") != std::string::npos);
    CHECK(rep.to_text() == txt);
}

}
