// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/test_functions.hpp"

#include <cmath>

#include "jumplab/error.hpp"

namespace jumplab {

namespace {

const char* const kNames[] = {"constant", "sin1", "cos1", "sincos", "gauss_bump", "square1"};

}  // namespace

TestFunction TestFunction::by_name(std::string_view name)
{
    for (int i = 0; i < 6; ++i)
        if (name == kNames[i]) return TestFunction(static_cast<TestFunctionKind>(i));
    throw DomainError("unknown test function '" + std::string(name) + "'");
}

std::vector<std::string> TestFunction::names() { return {std::begin(kNames), std::end(kNames)}; }

std::string TestFunction::name() const { return kNames[static_cast<int>(kind_)]; }

double TestFunction::value(const Vec& x) const
{
    switch (kind_) {
    case TestFunctionKind::constant: return 1.0;
    case TestFunctionKind::sin1: return std::sin(x[0]);
    case TestFunctionKind::cos1: return std::cos(x[0]);
    case TestFunctionKind::sincos: {
        // sin(x1) cos(x2) cos(x3)
        double v = std::sin(x[0]);
        for (int i = 1; i < x.dim(); ++i) v *= std::cos(x[i]);
        return v;
    }
    case TestFunctionKind::gauss_bump: return std::exp(-0.5 * x.norm_sq());
    case TestFunctionKind::square1: return x[0] * x[0];
    }
    return 0.0;
}

Vec TestFunction::gradient(const Vec& x) const
{
    Vec g = Vec::zero(x.dim());
    switch (kind_) {
    case TestFunctionKind::constant: break;
    case TestFunctionKind::sin1: g[0] = std::cos(x[0]); break;
    case TestFunctionKind::cos1: g[0] = -std::sin(x[0]); break;
    case TestFunctionKind::sincos:
        for (int i = 0; i < x.dim(); ++i) {
            double v = i == 0 ? std::cos(x[0]) : std::sin(x[0]);
            for (int j = 1; j < x.dim(); ++j) v *= j == i ? -std::sin(x[j]) : std::cos(x[j]);
            g[i] = v;
        }
        break;
    case TestFunctionKind::gauss_bump: {
        const double e = std::exp(-0.5 * x.norm_sq());
        for (int i = 0; i < x.dim(); ++i) g[i] = -x[i] * e;
        break;
    }
    case TestFunctionKind::square1: g[0] = 2.0 * x[0]; break;
    }
    return g;
}

}  // namespace jumplab
