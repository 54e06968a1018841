// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <span>

namespace jumplab {

inline constexpr int kMaxDim = 3;

/// Small fixed-capacity vector used for states and jump vectors (d <= 3).
class Vec {
public:
    constexpr Vec() = default;
    explicit constexpr Vec(int d) : d_(d) { assert(d >= 0 && d <= kMaxDim); }
    constexpr Vec(std::initializer_list<double> values) : d_(static_cast<int>(values.size()))
    {
        assert(values.size() <= kMaxDim);
        int i = 0;
        for (double v : values) c_[i++] = v;
    }
    static Vec from_span(std::span<const double> values)
    {
        assert(values.size() <= kMaxDim);
        Vec v(static_cast<int>(values.size()));
        for (std::size_t i = 0; i < values.size(); ++i) v.c_[i] = values[i];
        return v;
    }
    static constexpr Vec zero(int d) { return Vec(d); }
    static constexpr Vec unit(int d, int axis)
    {
        Vec v(d);
        v.c_[axis] = 1.0;
        return v;
    }

    constexpr int dim() const noexcept { return d_; }
    constexpr double& operator[](int i) noexcept { return c_[i]; }
    constexpr double operator[](int i) const noexcept { return c_[i]; }
    std::span<const double> span() const noexcept { return {c_.data(), static_cast<std::size_t>(d_)}; }
    std::span<double> span() noexcept { return {c_.data(), static_cast<std::size_t>(d_)}; }

    double norm_sq() const noexcept
    {
        double s = 0.0;
        for (int i = 0; i < d_; ++i) s += c_[i] * c_[i];
        return s;
    }
    double norm() const noexcept { return std::sqrt(norm_sq()); }

    Vec& operator+=(const Vec& o) noexcept
    {
        for (int i = 0; i < d_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) noexcept
    {
        for (int i = 0; i < d_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Vec& operator*=(double s) noexcept
    {
        for (int i = 0; i < d_; ++i) c_[i] *= s;
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) noexcept { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) noexcept { return a -= b; }
    friend Vec operator*(double s, Vec a) noexcept { return a *= s; }
    friend Vec operator-(Vec a) noexcept { return a *= -1.0; }
    friend bool operator==(const Vec& a, const Vec& b) noexcept
    {
        if (a.d_ != b.d_) return false;
        for (int i = 0; i < a.d_; ++i)
            if (a.c_[i] != b.c_[i]) return false;
        return true;
    }

private:
    std::array<double, kMaxDim> c_{};
    int d_ = 0;
};

inline double dot(const Vec& a, const Vec& b) noexcept
{
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace jumplab
