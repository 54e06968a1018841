// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2; only reached through dispatch after a CPU check.

#include "jumplab/simd.hpp"

#include <immintrin.h>

namespace jumplab::simd::avx2 {

namespace {

// Lane order matches the scalar reference: tail element i joins lane i % 4.
inline double finish(__m256d v, const double* tail, std::size_t start, std::size_t n) noexcept
{
    alignas(32) double acc[4];
    _mm256_store_pd(acc, v);
    for (std::size_t i = start; i < n; ++i) {
        acc[i % 4] += tail[i - start];
    }
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace

double sum(const double* x, std::size_t n) noexcept
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    }
    return finish(acc, x + i, i, n);
}

double dot(const double* a, const double* b, std::size_t n) noexcept
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, p);
    }
    double tail[4];
    for (std::size_t k = i; k < n; ++k) {
        tail[k - i] = a[k] * b[k];
    }
    return finish(acc, tail, i, n);
}

double sum_sq_dev(const double* x, std::size_t n, double center) noexcept
{
    const __m256d c = _mm256_set1_pd(center);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), c);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double tail[4];
    for (std::size_t k = i; k < n; ++k) {
        double d = x[k] - center;
        tail[k - i] = d * d;
    }
    return finish(acc, tail, i, n);
}

}  // namespace jumplab::simd::avx2
