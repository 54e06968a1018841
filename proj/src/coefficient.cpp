// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/coefficient.hpp"

#include <charconv>
#include <cmath>

#include "jumplab/error.hpp"

namespace jumplab {

namespace {

std::string num(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// Negative literals are not tokens in the grammar.
std::string lit(double v)
{
    if (v < 0) return "(-" + num(-v) + ")";
    return num(v);
}

}  // namespace

CoefficientFn CoefficientFn::constant(double value, expr::Domain domain)
{
    CoefficientFn f = from_expr(expr::parse(lit(value), domain), Bounds{value, value}, 0.0);
    f.family_ = "constant";
    f.params_ = {value};
    return f;
}

CoefficientFn CoefficientFn::from_expr(expr::Expr e, std::optional<Bounds> bounds, std::optional<double> lipschitz)
{
    CoefficientFn f;
    f.expr_ = std::move(e);
    f.bounds_ = bounds;
    f.lipschitz_ = lipschitz;
    f.family_.clear();
    f.params_.clear();
    if (auto c = f.expr_.constant_value()) {
        f.bounds_ = Bounds{*c, *c};
        f.lipschitz_ = 0.0;
    }
    return f;
}

CoefficientFn CoefficientFn::parse(std::string_view source, expr::Domain domain)
{
    return from_expr(expr::parse(source, domain));
}

CoefficientFn CoefficientFn::decaying_bump(double base, double amp)
{
    // d/dr amp/(1+r^2) peaks at r = 1/sqrt(3) with magnitude amp * 3 sqrt(3) / 8.
    const double lo = std::min(base, base + amp);
    const double hi = std::max(base, base + amp);
    CoefficientFn f = from_expr(expr::parse(lit(base) + " + " + lit(amp) + "/(1 + |x|^2)"), Bounds{lo, hi},
                                std::fabs(amp) * 3.0 * std::sqrt(3.0) / 8.0);
    f.family_ = "decaying_bump";
    f.params_ = {base, amp};
    return f;
}

CoefficientFn CoefficientFn::saturating_norm(double base, double amp)
{
    const double lo = std::min(base, base + amp);
    const double hi = std::max(base, base + amp);
    CoefficientFn f =
        from_expr(expr::parse(lit(base) + " + " + lit(amp) + "*min(|x|, 1)"), Bounds{lo, hi}, std::fabs(amp));
    f.family_ = "saturating_norm";
    f.params_ = {base, amp};
    return f;
}

CoefficientFn CoefficientFn::periodic(double base, double amp, double freq)
{
    CoefficientFn f = from_expr(expr::parse(lit(base) + " + " + lit(amp) + "*sin(" + lit(freq) + "*x[0])"),
                                Bounds{base - std::fabs(amp), base + std::fabs(amp)}, std::fabs(amp * freq));
    f.family_ = "periodic";
    f.params_ = {base, amp, freq};
    return f;
}

CoefficientFn CoefficientFn::radial_step(double below, double above, double at)
{
    CoefficientFn f = from_expr(
        expr::parse(lit(below) + " + " + lit(above - below) + "*step(r - " + lit(at) + ")", expr::Domain::radial),
        Bounds{std::min(below, above), std::max(below, above)}, std::nullopt);
    f.family_ = "radial_step";
    f.params_ = {below, above, at};
    return f;
}

CoefficientFn CoefficientFn::family(std::string_view name, std::span<const double> p, expr::Domain domain)
{
    auto need = [&](std::size_t n) {
        if (p.size() != n) {
            throw DomainError("family '" + std::string(name) + "' takes " + std::to_string(n) + " parameters, got " +
                              std::to_string(p.size()));
        }
    };
    const bool radial = domain == expr::Domain::radial;
    if (name == "constant") {
        need(1);
        return constant(p[0], domain);
    }
    if (name == "radial_step" && radial) {
        need(3);
        return radial_step(p[0], p[1], p[2]);
    }
    if (!radial) {
        if (name == "decaying_bump") {
            need(2);
            return decaying_bump(p[0], p[1]);
        }
        if (name == "saturating_norm") {
            need(2);
            return saturating_norm(p[0], p[1]);
        }
        if (name == "periodic") {
            need(3);
            return periodic(p[0], p[1], p[2]);
        }
    }
    throw DomainError("unknown coefficient family '" + std::string(name) + "'");
}

CoefficientFn CoefficientFn::with_bounds(Bounds b) const
{
    CoefficientFn f = *this;
    f.bounds_ = b;
    return f;
}

CoefficientFn CoefficientFn::with_lipschitz(double l) const
{
    CoefficientFn f = *this;
    f.lipschitz_ = l;
    return f;
}

std::string CoefficientFn::describe() const
{
    if (family_.empty()) return "\"" + expr_.source() + "\"";
    std::string s = "@" + family_ + "(";
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (i) s += ", ";
        s += num(params_[i]);
    }
    return s + ")";
}

}  // namespace jumplab
