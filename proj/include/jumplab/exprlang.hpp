// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jumplab/vec.hpp"

/// A small total expression language for scalar coefficient functions.
///
/// State expressions see the coordinates `x[i]` and the norm `|x|`; radial
/// expressions (Hunt-kernel index functions) see the scalar `r`. The builtin
/// set is fixed: + - * / ^, unary minus, exp log sin cos sqrt abs step,
/// min max clamp, and the constants pi and e.
namespace jumplab::expr {

enum class Domain { state, radial };

enum class Op : std::uint8_t {
    constant,
    coord,
    norm,
    radius,
    neg,
    add,
    sub,
    mul,
    div,
    pow,
    exp,
    log,
    sin,
    cos,
    sqrt,
    abs,
    step,
    min,
    max,
    clamp,
};

struct Node {
    Op op = Op::constant;
    double value = 0.0;   // constant
    int index = 0;        // coord
    int args[3] = {-1, -1, -1};
    std::size_t offset = 0;  // byte offset in the source, for diagnostics
};

/// Immutable parsed expression. Copies share the compiled program.
class Expr {
public:
    Expr();  // the constant 0

    Domain domain() const noexcept;
    const std::string& source() const noexcept;

    /// Evaluates at a state point. Throws DomainError on a violated guard and
    /// IndexError when a coordinate index is >= x.size().
    double eval(std::span<const double> x) const;
    double eval(const Vec& x) const { return eval(x.span()); }
    double eval_radial(double r) const;

    /// Canonical, fully parenthesised rendering that reparses to an equal tree.
    std::string to_string() const;

    /// False when the value cannot vary with the state (or with r).
    bool depends_on_variables() const noexcept;
    std::optional<double> constant_value() const;
    /// Largest coordinate index referenced, -1 if none.
    int max_coordinate() const noexcept;

    const std::vector<Node>& nodes() const noexcept;
    int root() const noexcept;

    friend bool operator==(const Expr& a, const Expr& b) noexcept;

private:
    struct Program;
    explicit Expr(std::shared_ptr<const Program> program);
    double run(std::span<const double> x, double r) const;

    std::shared_ptr<const Program> program_;

    friend Expr parse(std::string_view source, Domain domain);
};

/// Parses `source`. Throws SyntaxError (byte offset + expected tokens) or
/// UnknownIdentifier.
Expr parse(std::string_view source, Domain domain = Domain::state);

struct RangeReport {
    double min = 0.0;
    double max = 0.0;
    Vec argmin;
    Vec argmax;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t points = 0;
    bool pass = false;
};

/// Observed min/max of `e` over the grid compared against [lo, hi]. Grid
/// based and advisory. Evaluation errors are rethrown with the grid point.
RangeReport check_range(const Expr& e, std::span<const Vec> grid, double lo, double hi);

}  // namespace jumplab::expr
