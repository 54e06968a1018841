// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/error.hpp"

namespace jumplab {

namespace {

std::string describe_syntax(std::size_t offset, const std::vector<std::string>& expected,
                            const std::string& found)
{
    std::string msg = "syntax error at byte " + std::to_string(offset) + ": found " + found;
    if (!expected.empty()) {
        msg += ", expected one of {";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) msg += ", ";
            msg += expected[i];
        }
        msg += "}";
    }
    return msg;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : Error(describe_syntax(offset, expected, found)), offset_(offset), expected_(std::move(expected))
{
}

UnknownIdentifier::UnknownIdentifier(std::size_t offset, const std::string& name)
    : Error("unknown identifier '" + name + "' at byte " + std::to_string(offset)),
      offset_(offset),
      name_(name)
{
}

ConfigError::ConfigError(std::size_t line, const std::string& what)
    : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
{
}

}  // namespace jumplab
