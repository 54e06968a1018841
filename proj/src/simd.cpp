// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace jumplab::simd {

namespace {

Isa detect() noexcept
{
    if (const char* env = std::getenv("JUMPLAB_SIMD"); env && std::string_view(env) == "scalar") {
        return Isa::scalar;
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<int>& current()
{
    static std::atomic<int> isa{static_cast<int>(detect())};
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept
{
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool cpu_has_avx2() noexcept
{
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() noexcept
{
    return static_cast<Isa>(current().load(std::memory_order_relaxed));
}

void force_isa(Isa isa) noexcept
{
    if (isa == Isa::avx2 && !cpu_has_avx2()) return;
    current().store(static_cast<int>(isa), std::memory_order_relaxed);
}

double sum(std::span<const double> x) noexcept
{
    return active_isa() == Isa::avx2 ? avx2::sum(x.data(), x.size()) : scalar::sum(x.data(), x.size());
}

double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    const std::size_t n = a.size() < b.size() ? a.size() : b.size();
    return active_isa() == Isa::avx2 ? avx2::dot(a.data(), b.data(), n) : scalar::dot(a.data(), b.data(), n);
}

double sum_sq_dev(std::span<const double> x, double center) noexcept
{
    return active_isa() == Isa::avx2 ? avx2::sum_sq_dev(x.data(), x.size(), center)
                                     : scalar::sum_sq_dev(x.data(), x.size(), center);
}

}  // namespace jumplab::simd
