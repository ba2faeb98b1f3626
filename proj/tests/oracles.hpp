// SPDX-License-Identifier: Apache-2.0
// Test-only reference implementations, written against the definitions
// rather than the library code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "fp8cim/dsbp.hpp"
#include "fp8cim/fp8.hpp"

namespace oracle {

// Deterministic bounded sampling (multiply-shift on the raw engine output).
inline uint32_t bounded(std::mt19937_64& rng, uint32_t n) {
    return static_cast<uint32_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// Textbook minifloat decode: nullopt for Inf/NaN encodings.
inline std::optional<double> decode(uint8_t byte, const fp8cim::Fp8Format& fmt) {
    int m = fmt.mant_bits;
    int e = (byte >> m) & ((1 << fmt.exp_bits) - 1);
    int frac = byte & ((1 << m) - 1);
    double sign = (byte & 0x80) ? -1.0 : 1.0;
    if (fmt.exp_bits == 5 && e == 31)
        return std::nullopt;
    if (fmt.exp_bits == 4 && e == 15 && frac == 7)
        return std::nullopt;
    double f = static_cast<double>(frac) / (1 << m);
    if (e == 0)
        return sign * f * std::pow(2.0, 1 - fmt.bias);
    return sign * (1.0 + f) * std::pow(2.0, e - fmt.bias);
}

// floor(mantissa * 2^sh) through explicit floor division, no shift operators.
inline int64_t floor_scale(int64_t mantissa, int sh) {
    if (sh >= 0)
        return mantissa * static_cast<int64_t>(std::pow(2.0, sh));
    int64_t d = static_cast<int64_t>(std::pow(2.0, -sh));
    int64_t q = mantissa / d;
    if (mantissa % d != 0 && mantissa < 0)
        --q;
    return q;
}

// Single-ceiling bitwidth formula: ceil(k * avg + b_fix) over the exact
// rational average of shifts weighted by 2^-shift, clamped to [1,11].
inline int exact_bitwidth(const std::vector<int>& shifts, int k_quarters, int b_fix) {
    int max_s = *std::max_element(shifts.begin(), shifts.end());
    long long num = 0;
    long long den = 0;
    for (int s : shifts) {
        num += static_cast<long long>(s) << (max_s - s);
        den += 1ll << (max_s - s);
    }
    long long t = static_cast<long long>(k_quarters) * num + 4ll * den * b_fix;
    long long b = (t + 4ll * den - 1) / (4ll * den);   // ceil
    return static_cast<int>(std::clamp(b, 1ll, 11ll));
}

// Plain wide-integer dot product.
inline int64_t dot(const std::vector<int32_t>& a, const std::vector<int32_t>& b) {
    int64_t acc = 0;
    for (size_t i = 0; i < a.size(); ++i)
        acc += int64_t{a[i]} * b[i];
    return acc;
}

inline uint8_t random_finite_byte(std::mt19937_64& rng, const fp8cim::Fp8Format& fmt) {
    for (;;) {
        uint8_t b = static_cast<uint8_t>(bounded(rng, 256));
        if (fmt.finite_encoding(b))
            return b;
    }
}

// Group built straight from bytes, zero-padded to 64 lanes.
inline fp8cim::Group make_group(const fp8cim::Fp8Format& fmt,
                                const std::vector<uint8_t>& bytes) {
    fp8cim::Group g;
    g.format = fmt;
    g.valid = bytes.size();
    for (uint8_t b : bytes)
        g.elems.push_back(fp8cim::decode(b, fmt));
    g.elems.resize(64, fp8cim::Decoded{1, 0, 0, true});
    return g;
}

} // namespace oracle
