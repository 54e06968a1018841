// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace jumplab {

struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    std::size_t n = 0;

    /// mean / se; 0 when both vanish, +-inf when only se does.
    double z_score() const noexcept;
};

/// Sample mean and standard error (n - 1 denominator), reduced with the
/// fixed-order SIMD kernels.
MeanEstimate mean_se(std::span<const double> values);

/// Linear-interpolation quantile (type 7) of the values; q in [0, 1].
double quantile(std::vector<double> values, double q);

struct KsResult {
    double statistic = 0.0;  // sup |F_a - F_b|
    double p_value = 1.0;    // asymptotic Kolmogorov distribution
};

/// Two-sample Kolmogorov-Smirnov test. Ties across samples are stepped over
/// together so discrete laws are handled.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

}  // namespace jumplab
