// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jumplab/exprlang.hpp"

namespace jumplab {

struct Bounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Scalar function of the state (or of the radius r for Hunt index
/// functions). Builtin families carry analytic bounds and a Lipschitz
/// constant; user expressions may declare them.
class CoefficientFn {
public:
    CoefficientFn() : bounds_(Bounds{0.0, 0.0}), lipschitz_(0.0), family_("constant"), params_{0.0} {}

    static CoefficientFn constant(double value, expr::Domain domain = expr::Domain::state);
    static CoefficientFn from_expr(expr::Expr e, std::optional<Bounds> bounds = std::nullopt,
                                   std::optional<double> lipschitz = std::nullopt);
    static CoefficientFn parse(std::string_view source, expr::Domain domain = expr::Domain::state);

    /// base + amp / (1 + |x|^2), bounds [base, base + amp] for amp >= 0.
    static CoefficientFn decaying_bump(double base, double amp);
    /// base + amp * min(|x|, 1).
    static CoefficientFn saturating_norm(double base, double amp);
    /// base + amp * sin(freq * x[0]).
    static CoefficientFn periodic(double base, double amp, double freq);
    /// Radial step: below for r < at, above for r >= at.
    static CoefficientFn radial_step(double below, double above, double at);

    /// Builds a family by name ("constant", "decaying_bump", ...). Throws
    /// DomainError for unknown names or wrong parameter counts.
    static CoefficientFn family(std::string_view name, std::span<const double> params,
                                expr::Domain domain = expr::Domain::state);

    double operator()(const Vec& x) const { return expr_.eval(x); }
    double at_radius(double r) const { return expr_.eval_radial(r); }

    const expr::Expr& expr() const noexcept { return expr_; }
    const std::optional<Bounds>& declared_bounds() const noexcept { return bounds_; }
    const std::optional<double>& lipschitz() const noexcept { return lipschitz_; }
    const std::string& family_name() const noexcept { return family_; }
    const std::vector<double>& family_params() const noexcept { return params_; }

    std::optional<double> constant_value() const { return expr_.constant_value(); }
    bool state_free() const noexcept { return !expr_.depends_on_variables(); }

    CoefficientFn with_bounds(Bounds b) const;
    CoefficientFn with_lipschitz(double l) const;

    /// Human-readable description for reports.
    std::string describe() const;

private:
    expr::Expr expr_;
    std::optional<Bounds> bounds_;
    std::optional<double> lipschitz_;
    std::string family_;
    std::vector<double> params_;
};

}  // namespace jumplab
