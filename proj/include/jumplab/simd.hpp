// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

/// Reduction kernels used by the quadrature rules and the ensemble estimators.
///
/// Every kernel has a scalar reference and an AVX2 variant. Both accumulate
/// into four lanes (element i feeds lane i % 4, tail included) and combine the
/// lanes as (l0 + l1) + (l2 + l3), with no fused multiply-add, so the two
/// variants return identical bits. The variant is chosen once at runtime from
/// the CPU features; JUMPLAB_SIMD=scalar forces the reference path.
namespace jumplab::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// True when the running CPU can execute the AVX2 kernels.
bool cpu_has_avx2() noexcept;

Isa active_isa() noexcept;

/// Overrides dispatch (tests only). Requesting avx2 on a CPU without it is ignored.
void force_isa(Isa isa) noexcept;

double sum(std::span<const double> x) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;
/// Sum of (x_i - center)^2.
double sum_sq_dev(std::span<const double> x, double center) noexcept;

namespace scalar {
double sum(const double* x, std::size_t n) noexcept;
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum_sq_dev(const double* x, std::size_t n, double center) noexcept;
}  // namespace scalar

namespace avx2 {
double sum(const double* x, std::size_t n) noexcept;
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum_sq_dev(const double* x, std::size_t n, double center) noexcept;
}  // namespace avx2

}  // namespace jumplab::simd
