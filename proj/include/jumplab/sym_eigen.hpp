// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "jumplab/kernels.hpp"

namespace jumplab {

/// Eigenvalues of a symmetric d x d matrix (d <= 3) in ascending order, from
/// the characteristic polynomial. Entries beyond d are zero.
std::array<double, kMaxDim> symmetric_eigenvalues(const Matrix3& a, int d);

}  // namespace jumplab
