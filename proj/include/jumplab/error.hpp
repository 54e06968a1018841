// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace jumplab {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. Carries the byte offset of the offending token
/// and the set of tokens the parser would have accepted there.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found);

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(std::size_t offset, const std::string& name);

    std::size_t offset() const noexcept { return offset_; }
    const std::string& name() const noexcept { return name_; }

private:
    std::size_t offset_;
    std::string name_;
};

/// A guard was violated while evaluating (log of non-positive, division by
/// zero, non-finite result) or an argument lies outside its admissible range.
class DomainError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

/// Density requested from a kernel that carries point masses.
class AtomicKernelError : public Error {
public:
    using Error::Error;
};

/// An integral was found (or declared) to be infinite.
class DivergentIntegral : public Error {
public:
    using Error::Error;
};

class ToleranceNotMet : public Error {
public:
    ToleranceNotMet(const std::string& what, double value, double error_bound)
        : Error(what), value_(value), error_bound_(error_bound)
    {
    }
    double value() const noexcept { return value_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double value_;
    double error_bound_;
};

/// Thinning acceptance probability exceeded one: the dominating rate is too small.
class EnvelopeViolation : public Error {
public:
    using Error::Error;
};

class JumpCapExceeded : public Error {
public:
    using Error::Error;
};

/// Config file problem, anchored to a 1-based line (0 when not line specific).
class ConfigError : public Error {
public:
    ConfigError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace jumplab
