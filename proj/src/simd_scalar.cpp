// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/simd.hpp"

namespace jumplab::simd::scalar {

double sum(const double* x, std::size_t n) noexcept
{
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        acc[i % 4] += x[i];
    }
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double dot(const double* a, const double* b, std::size_t n) noexcept
{
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        double p = a[i] * b[i];
        acc[i % 4] += p;
    }
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum_sq_dev(const double* x, std::size_t n, double center) noexcept
{
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - center;
        double sq = d * d;
        acc[i % 4] += sq;
    }
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace jumplab::simd::scalar
