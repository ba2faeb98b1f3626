// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "fp8cim/fp8.hpp"

namespace fp8cim {

// uniform_exponent: every finite encoding equally likely.
// concentrated: one shared exponent, random signs and mantissas.
// outlier_heavy: per 64-element block, mostly tight groups with a mix of
// wide and outlier-spiked blocks, to give a dynamic predictor something to
// exploit.
enum class SynthDist { uniform_exponent, concentrated, outlier_heavy };

std::optional<SynthDist> parse_dist(std::string_view name);

// Deterministic for a given (dist, fmt, count, seed) on any platform: all
// sampling is integer arithmetic on a fixed-width generator.
Fp8Tensor gen_synthetic(SynthDist dist, const Fp8Format& fmt, size_t count, uint64_t seed);

} // namespace fp8cim
