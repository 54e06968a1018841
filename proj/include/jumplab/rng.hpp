// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace jumplab {

/// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Seed of the substream for `index` under `base`.
std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// mt19937_64 (whose output sequence the standard pins down) with
/// distribution transforms written out here, so draws are identical on every
/// platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }
    double exponential(double rate);
    /// Standard normal (Box-Muller, one value per call pair cached).
    double normal();

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace jumplab
