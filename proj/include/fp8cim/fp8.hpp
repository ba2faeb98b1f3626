// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fp8cim {

// 8-bit minifloat: 1 sign bit, exp_bits exponent, mant_bits = 7 - exp_bits
// mantissa, bias = 2^(exp_bits-1) - 1. Special-value policy differs per split:
//   E5M2        IEEE-like, exponent field 31 is Inf (mantissa 0) or NaN
//   E4M3        only S.1111.111 is NaN, rest of the top binade is finite
//   E2M5, E3M4  every encoding is finite
struct Fp8Format {
    int exp_bits;
    int mant_bits;
    int bias;

    static Fp8Format from_exp_bits(int exp_bits);
    static Fp8Format e2m5() { return from_exp_bits(2); }
    static Fp8Format e3m4() { return from_exp_bits(3); }
    static Fp8Format e4m3() { return from_exp_bits(4); }
    static Fp8Format e5m2() { return from_exp_bits(5); }

    // Accepts "E4M3", "e4m3", ...; nullopt for anything else.
    static std::optional<Fp8Format> parse(std::string_view name);
    std::string name() const;

    int exp_field_max() const { return (1 << exp_bits) - 1; }
    bool finite_encoding(uint8_t byte) const;
    // Largest finite magnitude and its positive encoding.
    double max_finite() const;
    uint8_t max_finite_byte() const;

    bool operator==(const Fp8Format&) const = default;
};

// Decoded element. sign is +1/-1 (-0 keeps sign -1), e_raw is the biased
// exponent field, sig carries the hidden bit for normals. align_sig() doubles
// subnormal significands so that
//   value = sign * align_sig * 2^(e_raw - bias - mant_bits)
// holds for every finite encoding, zero included. That identity is what the
// alignment path shifts against.
struct Decoded {
    int sign;
    int e_raw;
    int sig;
    bool is_zero;

    bool is_subnormal() const { return e_raw == 0; }
    int align_sig() const { return e_raw == 0 ? sig << 1 : sig; }
};

// Throws std::domain_error on Inf/NaN encodings (E4M3/E5M2 only).
Decoded decode(uint8_t byte, const Fp8Format& fmt);
double to_real(const Decoded& d, const Fp8Format& fmt);
double decode_real(uint8_t byte, const Fp8Format& fmt);

// Round-to-nearest-even, saturating at max_finite. Never produces Inf/NaN
// encodings; throws std::domain_error if value itself is non-finite.
uint8_t encode(double value, const Fp8Format& fmt);

// Row-major FP8 tensor. Elements are pre-decoded; construction rejects
// non-finite encodings, zero-size dims and rank 0.
struct Fp8Tensor {
    Fp8Format format;
    std::vector<uint32_t> dims;
    std::vector<uint8_t> bytes;
    std::vector<Decoded> elems;

    static Fp8Tensor from_bytes(const Fp8Format& fmt, std::vector<uint32_t> dims,
                                std::vector<uint8_t> bytes);
    size_t size() const { return bytes.size(); }
    uint32_t last_dim() const { return dims.back(); }
    std::vector<double> to_reals() const;
};

} // namespace fp8cim
