// SPDX-License-Identifier: Apache-2.0
#include "fp8cim/synthetic.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace fp8cim {

namespace {

// std::uniform_int_distribution is not bit-reproducible across standard
// libraries; a multiply-shift reduction of the raw engine output is.
uint32_t bounded(std::mt19937_64& rng, uint32_t n) {
    return static_cast<uint32_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// Highest biased exponent that still has finite encodings for every
// mantissa value (dodges the E5M2 Inf/NaN binade, keeps E4M3 as-is since
// only its all-ones mantissa is NaN).
int top_exponent(const Fp8Format& fmt) {
    return fmt.exp_bits == 5 ? fmt.exp_field_max() - 1 : fmt.exp_field_max();
}

uint8_t make_byte(std::mt19937_64& rng, const Fp8Format& fmt, int e_raw) {
    int mant = static_cast<int>(bounded(rng, 1u << fmt.mant_bits));
    // E4M3 top binade: all-ones mantissa would be NaN.
    if (fmt.exp_bits == 4 && e_raw == fmt.exp_field_max() && mant == (1 << fmt.mant_bits) - 1)
        mant -= 1;
    int sign = static_cast<int>(bounded(rng, 2));
    return static_cast<uint8_t>((sign << 7) | (e_raw << fmt.mant_bits) | mant);
}

} // namespace

std::optional<SynthDist> parse_dist(std::string_view name) {
    if (name == "uniform-exponent")
        return SynthDist::uniform_exponent;
    if (name == "concentrated")
        return SynthDist::concentrated;
    if (name == "outlier-heavy")
        return SynthDist::outlier_heavy;
    return std::nullopt;
}

Fp8Tensor gen_synthetic(SynthDist dist, const Fp8Format& fmt, size_t count, uint64_t seed) {
    if (count == 0)
        throw std::invalid_argument("gen_synthetic: count must be positive");
    std::mt19937_64 rng(seed);
    int e_top = top_exponent(fmt);
    int e_center = std::min(fmt.bias + 2, e_top);
    std::vector<uint8_t> bytes;
    bytes.reserve(count);

    switch (dist) {
    case SynthDist::uniform_exponent:
        for (size_t i = 0; i < count; ++i) {
            uint8_t b;
            do {
                b = static_cast<uint8_t>(bounded(rng, 256));
            } while (!fmt.finite_encoding(b));
            bytes.push_back(b);
        }
        break;
    case SynthDist::concentrated:
        // One shared exponent: every shift profile is all-zero, b_dyn = 0.
        for (size_t i = 0; i < count; ++i)
            bytes.push_back(make_byte(rng, fmt, e_center));
        break;
    case SynthDist::outlier_heavy:
        // Block-structured so group character varies: the alignment hardware
        // works on 64-element groups.
        for (size_t base = 0; base < count; base += 64) {
            size_t blk = std::min<size_t>(64, count - base);
            uint32_t kind = bounded(rng, 10);
            for (size_t i = 0; i < blk; ++i) {
                int e;
                if (kind < 6) {
                    // tight: spread <= 1, narrow groups
                    e = e_center - static_cast<int>(bounded(rng, 2));
                } else if (kind < 8) {
                    // wide: spread ~6
                    e = e_center - static_cast<int>(bounded(rng, 7));
                } else {
                    // spiked: mostly tight plus a few deep outliers
                    e = bounded(rng, 16) == 0 ? e_center - 12
                                              : e_center - static_cast<int>(bounded(rng, 2));
                }
                bytes.push_back(make_byte(rng, fmt, std::clamp(e, 0, e_top)));
            }
        }
        break;
    }
    return Fp8Tensor::from_bytes(fmt, {static_cast<uint32_t>(count)}, std::move(bytes));
}

} // namespace fp8cim
