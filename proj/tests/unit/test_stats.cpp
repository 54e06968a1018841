// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "jumplab/stats.hpp"

using namespace jumplab;

namespace {

// Theta-function form of the Kolmogorov CDF, independent of the alternating series.
double kolmogorov_cdf_theta(double lambda)
{
    const double pi = std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k < 50; ++k) s += std::exp(-(2 * k - 1) * (2 * k - 1) * pi * pi / (8 * lambda * lambda));
    return std::sqrt(2 * pi) / lambda * s;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("mean and standard error")
{
    const std::vector<double> v = {1, 2, 3, 4};
    const auto m = mean_se(v);
    CHECK(m.mean == 2.5);
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)).epsilon(1e-15));
    CHECK(m.n == 4);
    CHECK(m.z_score() == doctest::Approx(2.5 / m.se));
    const std::vector<double> zeros(10, 0.0);
    CHECK(mean_se(zeros).z_score() == 0.0);
    const std::vector<double> one = {3.0};
    CHECK(mean_se(one).se == 0.0);
}

TEST_CASE("quantile type 7")
{
    const std::vector<double> v = {5, 1, 4, 2, 3};
    CHECK(quantile(v, 0.0) == 1);
    CHECK(quantile(v, 1.0) == 5);
    CHECK(quantile(v, 0.5) == 3);
    CHECK(quantile(v, 0.1) == doctest::Approx(1.4));
    CHECK(quantile({2.0, 4.0}, 0.25) == doctest::Approx(2.5));
}

TEST_CASE("Kolmogorov survival against the theta form")
{
    for (double l : {0.3, 0.5, 0.8, 1.0, 1.36, 1.63, 2.0})
        CHECK(kolmogorov_survival(l) == doctest::Approx(1 - kolmogorov_cdf_theta(l)).epsilon(1e-10));
    CHECK(kolmogorov_survival(0.0) == 1.0);
    CHECK(kolmogorov_survival(1.358) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("two-sample KS")
{
    const auto r = ks_two_sample({1, 2, 3}, {4, 5, 6});
    CHECK(r.statistic == 1.0);
    const auto s = ks_two_sample({1, 2, 3, 4}, {1, 2, 3, 4});
    CHECK(s.statistic == 0.0);
    CHECK(s.p_value == 1.0);
    // ties across samples: step functions compared after each distinct value
    const auto t = ks_two_sample({0, 0, 1, 1}, {0, 1, 1, 1});
    CHECK(t.statistic == doctest::Approx(0.25));

    std::mt19937_64 g(1);
    std::normal_distribution<double> n;
    int rejections = 0;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> a(500), b(700);
        for (auto& x : a) x = n(g);
        for (auto& x : b) x = n(g);
        if (ks_two_sample(a, b).p_value < 0.05) ++rejections;
    }
    CHECK(rejections <= 12);
    std::vector<double> a(500), b(500);
    for (auto& x : a) x = n(g);
    for (auto& x : b) x = n(g) + 0.5;
    CHECK(ks_two_sample(a, b).p_value < 1e-6);
}

}
