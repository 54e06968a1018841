// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>

#include "doctest.h"
#include "fixtures.hpp"
#include "jumplab/error.hpp"
#include "jumplab/format.hpp"
#include "jumplab/path_io.hpp"

using namespace jumplab;

TEST_SUITE("path_io") {

TEST_CASE("shortest round trip formatting")
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.125, 0.0})
        CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("bit-exact round trip")
{
    SimConfig c;
    c.t_end = 3.0;
    c.epsilon = 0.05;
    c.base_seed = 12345;
    for (int d = 1; d <= 3; ++d) {
        Vec x0(d);
        for (int i = 0; i < d; ++i) x0[i] = 0.1 * (i + 1);
        const auto p = simulate_path(fx::index_family(d), x0, c, 3);
        const auto text = path_to_csv(p, c, 3);
        const auto q = path_from_csv(text);
        CHECK(q.x0 == p.x0);
        CHECK(q.seed == p.seed);
        CHECK(q.t_end == p.t_end);
        CHECK(q.jump_times == p.jump_times);
        REQUIRE(q.jump_vectors.size() == p.jump_vectors.size());
        for (std::size_t i = 0; i < p.jump_vectors.size(); ++i) CHECK(q.jump_vectors[i] == p.jump_vectors[i]);
        CHECK(q.truncation.dropped_variance_fraction == p.truncation.dropped_variance_fraction);
        CHECK(path_to_csv(q, c, 3) == text);
    }
}

TEST_CASE("header contract")
{
    SimConfig c;
    c.epsilon = 0.1;
    const auto p = simulate_path(fx::atoms_pm(0.5), Vec{0.0}, c, 0);
    const auto text = path_to_csv(p, c, 0);
    CHECK(text.find("jump_time,z1\n") != std::string::npos);
    CHECK(text.find("# d=1\n") != std::string::npos);
    CHECK(text.find("# mode=drop\n") != std::string::npos);
    CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("malformed input")
{
    CHECK_THROWS_AS(path_from_csv("garbage"), ConfigError);
    CHECK_THROWS_AS(path_from_csv("# d=1\n# x0=0\njump_time,z1\n0.5\n"), ConfigError);
    CHECK_THROWS_AS(path_from_csv("# d=1\n# x0=0\njump_time,z1\nx,1\n"), ConfigError);
}

}
