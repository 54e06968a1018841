// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "jumplab/coefficient.hpp"
#include "jumplab/error.hpp"
#include "jumplab/exprlang.hpp"
#include "jumplab/validators.hpp"

using namespace jumplab;
using expr::Domain;

TEST_SUITE("exprlang") {

TEST_CASE("constant literal")
{
    const auto e = expr::parse("2.0");
    CHECK(e.constant_value().value() == 2.0);
    CHECK(e.eval(Vec{3.7}) == 2.0);
    CHECK_FALSE(e.depends_on_variables());
}

TEST_CASE("well-formed arithmetic")
{
    const auto e = expr::parse("1 + 0.5/(1+|x|^2)");
    CHECK(e.eval(Vec{0.0}) == 1.5);
    const double x = 1.7;
    CHECK(e.eval(Vec{x}) == doctest::Approx(1.0 + 0.5 / (1.0 + x * x)).epsilon(1e-15));
    const Vec y{1.0, 2.0, 2.0};
    CHECK(e.eval(y) == doctest::Approx(1.0 + 0.5 / 10.0).epsilon(1e-15));
}

TEST_CASE("malformed input reports the offending byte")
{
    try {
        expr::parse("0.5*(1 + +)");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.offset() == 9);
        CHECK_FALSE(e.expected().empty());
    }
    CHECK_THROWS_AS(expr::parse("1 +"), SyntaxError);
    CHECK_THROWS_AS(expr::parse("(1"), SyntaxError);
    CHECK_THROWS_AS(expr::parse("min(1)"), SyntaxError);
    CHECK_THROWS_AS(expr::parse("1 2"), SyntaxError);
}

TEST_CASE("unknown identifiers")
{
    CHECK_THROWS_AS(expr::parse("foo(1)"), UnknownIdentifier);
    CHECK_THROWS_AS(expr::parse("y + 1"), UnknownIdentifier);
    CHECK_THROWS_AS(expr::parse("r + 1", Domain::state), UnknownIdentifier);
    CHECK_THROWS_AS(expr::parse("x[0]", Domain::radial), UnknownIdentifier);
    try {
        expr::parse("1 + bar");
    } catch (const UnknownIdentifier& e) {
        CHECK(e.offset() == 4);
        CHECK(e.name() == "bar");
    }
}

TEST_CASE("coordinate out of range")
{
    const auto e = expr::parse("x[3]");
    CHECK_THROWS_AS(e.eval(Vec{1.0}), IndexError);
    CHECK(expr::parse("x[1]").eval(Vec{1.0, 4.0}) == 4.0);
}

TEST_CASE("runtime guards")
{
    CHECK_THROWS_AS(expr::parse("log(x[0])").eval(Vec{0.0}), DomainError);
    CHECK_THROWS_AS(expr::parse("sqrt(x[0])").eval(Vec{-1.0}), DomainError);
    CHECK_THROWS_AS(expr::parse("1/x[0]").eval(Vec{0.0}), DomainError);
    CHECK_THROWS_AS(expr::parse("x[0]^0.5").eval(Vec{-2.0}), DomainError);
    CHECK_THROWS_AS(expr::parse("clamp(x[0], 2, 1)").eval(Vec{0.0}), DomainError);
    CHECK_THROWS_AS(expr::parse("exp(x[0])").eval(Vec{1000.0}), DomainError);
    CHECK(expr::parse("log(clamp(x[0], 1e-3, 10))").eval(Vec{0.0}) == doctest::Approx(std::log(1e-3)));
    CHECK(expr::parse("(-8)^3").eval(Vec{0.0}) == -512.0);
}

TEST_CASE("builtin functions against libm")
{
    const Vec x{0.3, -1.2};
    CHECK(expr::parse("exp(x[0])").eval(x) == std::exp(0.3));
    CHECK(expr::parse("sin(x[1])").eval(x) == std::sin(-1.2));
    CHECK(expr::parse("cos(x[1])").eval(x) == std::cos(-1.2));
    CHECK(expr::parse("abs(x[1])").eval(x) == 1.2);
    CHECK(expr::parse("|x[1]|").eval(x) == 1.2);
    CHECK(expr::parse("min(x[0], x[1])").eval(x) == -1.2);
    CHECK(expr::parse("max(x[0], x[1])").eval(x) == 0.3);
    CHECK(expr::parse("clamp(x[1], -1, 1)").eval(x) == -1.0);
    CHECK(expr::parse("step(x[0])").eval(x) == 1.0);
    CHECK(expr::parse("step(x[1])").eval(x) == 0.0);
    CHECK(expr::parse("|x|").eval(x) == doctest::Approx(std::hypot(0.3, 1.2)).epsilon(1e-15));
    CHECK(expr::parse("2^3^2").eval(x) == 512.0);
    CHECK(expr::parse("-2^2").eval(x) == -4.0);
    CHECK(expr::parse("pi").eval(x) == doctest::Approx(3.141592653589793));
    CHECK(expr::parse("r^2", Domain::radial).eval_radial(3.0) == 9.0);
}

TEST_CASE("round trip through the printer")
{
    const std::vector<std::string> sources = {
        "1 + 0.5/(1+|x|^2)", "-x[0]^2", "min(x[0], max(1, -2.5e-3))", "clamp(sin(x[1]) * 2, -1, 1)",
        "2^-1", "|x[0] - 1|", "exp(-|x|^2/2)", "1e300*1e-300", "0.1 + 0.2", "-(-(-1))",
    };
    for (const auto& s : sources) {
        const auto e = expr::parse(s);
        const auto again = expr::parse(e.to_string());
        CHECK_MESSAGE(e == again, s);
        CHECK(again.to_string() == e.to_string());
        const Vec x{0.7, -0.4};
        CHECK(e.eval(x) == again.eval(x));
    }
}

TEST_CASE("evaluation is bit deterministic")
{
    const auto e = expr::parse("sin(x[0])*exp(-|x|^2) + 1/(1+x[1]^2)");
    const Vec x{0.123456789, 9.87654321};
    const double a = e.eval(x);
    const auto copy = e;
    CHECK(copy.eval(x) == a);
    CHECK(expr::parse(e.source()).eval(x) == a);
}

TEST_CASE("check_range")
{
    const StateGrid grid = StateGrid::defaults(1);
    auto r1 = expr::check_range(expr::parse("1.5"), grid.points, 1.0, 2.0);
    CHECK(r1.pass);
    CHECK(r1.min == 1.5);
    CHECK(r1.max == 1.5);

    auto r2 = expr::check_range(expr::parse("1 + 0.5/(1+|x|^2)"), grid.points, 1.0, 2.0);
    CHECK(r2.pass);
    CHECK(r2.max == 1.5);
    CHECK(r2.min == doctest::Approx(1.0 + 0.5 / 101.0).epsilon(1e-14));

    auto r3 = expr::check_range(expr::parse("3.0"), grid.points, 1.0, 2.0);
    CHECK_FALSE(r3.pass);

    CHECK_THROWS_AS(expr::check_range(expr::parse("log(x[0])"), grid.points, 0.0, 1.0), DomainError);
}

TEST_CASE("builtin families satisfy their declared bounds")
{
    for (int d = 1; d <= 3; ++d) {
        const StateGrid grid = StateGrid::defaults(d);
        const std::vector<CoefficientFn> fams = {
            CoefficientFn::decaying_bump(1.0, 1.0), CoefficientFn::decaying_bump(1.0, 0.5),
            CoefficientFn::saturating_norm(1.0, 1.0), CoefficientFn::periodic(1.5, 0.25, 2.0),
            CoefficientFn::constant(1.0)};
        for (const auto& f : fams) {
            REQUIRE(f.declared_bounds());
            const auto rep = expr::check_range(f.expr(), grid.points, f.declared_bounds()->lo, f.declared_bounds()->hi);
            CHECK_MESSAGE(rep.pass, f.describe());
        }
    }
}

TEST_CASE("builtin Lipschitz constants dominate finite differences")
{
    const std::vector<CoefficientFn> fams = {CoefficientFn::decaying_bump(1.0, 1.0),
                                             CoefficientFn::saturating_norm(1.0, 1.0),
                                             CoefficientFn::periodic(1.5, 0.25, 2.0)};
    for (const auto& f : fams) {
        const double L = f.lipschitz().value();
        for (int k = -400; k < 400; ++k) {
            const double a = k * 0.01, b = a + 1e-4;
            CHECK(std::fabs(f(Vec{a}) - f(Vec{b})) <= L * 1e-4 * (1 + 1e-9));
        }
    }
}

TEST_CASE("expression corpus")
{
    std::ifstream in(JUMPLAB_TEST_DATA "/expr_corpus.txt");
    REQUIRE(in.good());
    std::string line;
    int accepted = 0, rejected = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find(' ');
        const std::string tag = line.substr(0, tab), src = line.substr(tab + 1);
        const Domain dom = tag.find("radial") != std::string::npos ? Domain::radial : Domain::state;
        if (tag.rfind("ok", 0) == 0) {
            CHECK_NOTHROW_MESSAGE(expr::parse(src, dom), src);
            ++accepted;
        } else {
            CHECK_THROWS_AS_MESSAGE(expr::parse(src, dom), Error, src);
            ++rejected;
        }
    }
    CHECK(accepted > 10);
    CHECK(rejected > 10);
}

}
