// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/sym_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace jumplab {

std::array<double, kMaxDim> symmetric_eigenvalues(const Matrix3& a, int d)
{
    std::array<double, kMaxDim> ev{};
    if (d == 1) {
        ev[0] = a[0][0];
        return ev;
    }
    if (d == 2) {
        const double mean = 0.5 * (a[0][0] + a[1][1]);
        const double half = 0.5 * (a[0][0] - a[1][1]);
        const double rad = std::hypot(half, a[0][1]);
        ev[0] = mean - rad;
        ev[1] = mean + rad;
        return ev;
    }
    // Trigonometric solution of the depressed cubic.
    const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    if (p1 == 0.0) {
        ev = {a[0][0], a[1][1], a[2][2]};
        std::sort(ev.begin(), ev.end());
        return ev;
    }
    const double b00 = a[0][0] - q, b11 = a[1][1] - q, b22 = a[2][2] - q;
    const double p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    const double det = b00 * (b11 * b22 - a[1][2] * a[1][2]) - a[0][1] * (a[0][1] * b22 - a[1][2] * a[0][2]) +
                       a[0][2] * (a[0][1] * a[1][2] - b11 * a[0][2]);
    const double half_det = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);
    const double phi = std::acos(half_det) / 3.0;
    const double hi = q + 2.0 * p * std::cos(phi);
    const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    ev = {lo, 3.0 * q - hi - lo, hi};
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace jumplab
