// SPDX-License-Identifier: Apache-2.0
#include "fp8cim/fp8.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fp8cim {

Fp8Format Fp8Format::from_exp_bits(int exp_bits) {
    if (exp_bits < 2 || exp_bits > 5)
        throw std::invalid_argument("fp8 exponent width must be in [2,5]");
    return Fp8Format{exp_bits, 7 - exp_bits, (1 << (exp_bits - 1)) - 1};
}

std::optional<Fp8Format> Fp8Format::parse(std::string_view name) {
    if (name.size() != 4)
        return std::nullopt;
    char e = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    char m = static_cast<char>(std::toupper(static_cast<unsigned char>(name[2])));
    if (e != 'E' || m != 'M')
        return std::nullopt;
    int eb = name[1] - '0';
    int mb = name[3] - '0';
    if (eb < 2 || eb > 5 || mb != 7 - eb)
        return std::nullopt;
    return from_exp_bits(eb);
}

std::string Fp8Format::name() const {
    return "E" + std::to_string(exp_bits) + "M" + std::to_string(mant_bits);
}

bool Fp8Format::finite_encoding(uint8_t byte) const {
    int e = (byte >> mant_bits) & exp_field_max();
    int m = byte & ((1 << mant_bits) - 1);
    if (exp_bits == 5)
        return e != exp_field_max();
    if (exp_bits == 4)
        return !(e == exp_field_max() && m == (1 << mant_bits) - 1);
    return true;
}

uint8_t Fp8Format::max_finite_byte() const {
    // Largest positive byte that is still finite under this format's policy.
    for (int b = 0x7f; b >= 0; --b)
        if (finite_encoding(static_cast<uint8_t>(b)))
            return static_cast<uint8_t>(b);
    return 0;
}

double Fp8Format::max_finite() const {
    return decode_real(max_finite_byte(), *this);
}

Decoded decode(uint8_t byte, const Fp8Format& fmt) {
    if (!fmt.finite_encoding(byte)) {
        char buf[8];
        snprintf(buf, sizeof buf, "0x%02x", byte);
        throw std::domain_error(fmt.name() + ": non-finite encoding " + buf);
    }
    Decoded d;
    d.sign = (byte & 0x80) ? -1 : 1;
    d.e_raw = (byte >> fmt.mant_bits) & fmt.exp_field_max();
    int frac = byte & ((1 << fmt.mant_bits) - 1);
    d.sig = d.e_raw == 0 ? frac : frac | (1 << fmt.mant_bits);
    d.is_zero = (byte & 0x7f) == 0;
    return d;
}

double to_real(const Decoded& d, const Fp8Format& fmt) {
    return d.sign * std::ldexp(static_cast<double>(d.align_sig()),
                               d.e_raw - fmt.bias - fmt.mant_bits);
}

double decode_real(uint8_t byte, const Fp8Format& fmt) {
    return to_real(decode(byte, fmt), fmt);
}

uint8_t encode(double value, const Fp8Format& fmt) {
    if (!std::isfinite(value))
        throw std::domain_error(fmt.name() + ": cannot encode non-finite value");
    uint8_t sign_bit = std::signbit(value) ? 0x80 : 0;
    double mag = std::fabs(value);
    if (mag >= fmt.max_finite())
        return sign_bit | fmt.max_finite_byte();
    if (mag == 0.0)
        return sign_bit;

    int e2;
    std::frexp(mag, &e2);                  // mag = f * 2^e2, f in [0.5,1)
    int e_raw = (e2 - 1) + fmt.bias;
    if (e_raw < 1)
        e_raw = 1;                         // subnormals share the e_raw=1 step
    // q is exact: step is a power of two, so the division only shifts the
    // exponent. Integer RNE on q is RNE on the format grid.
    double step = std::ldexp(1.0, e_raw - fmt.bias - fmt.mant_bits);
    double q = mag / step;
    double fl = std::floor(q);
    long long n = static_cast<long long>(fl);
    double r = q - fl;
    if (r > 0.5 || (r == 0.5 && (n & 1)))
        ++n;
    int hidden = 1 << fmt.mant_bits;
    if (n >= 2 * hidden) {                 // rounded across the binade top
        n >>= 1;
        ++e_raw;
    }
    uint8_t byte;
    if (n < hidden)                        // only reachable when e_raw == 1
        byte = static_cast<uint8_t>(sign_bit | n);
    else
        byte = static_cast<uint8_t>(sign_bit | (e_raw << fmt.mant_bits) |
                                    (n & (hidden - 1)));
    // mag < max_finite rounds to at most max_finite, so the encoding is
    // finite by construction; keep the check as a guard.
    if (!fmt.finite_encoding(byte))
        return sign_bit | fmt.max_finite_byte();
    return byte;
}

Fp8Tensor Fp8Tensor::from_bytes(const Fp8Format& fmt, std::vector<uint32_t> dims,
                                std::vector<uint8_t> bytes) {
    if (dims.empty())
        throw std::invalid_argument("tensor rank must be >= 1");
    uint64_t n = 1;
    for (uint32_t d : dims) {
        if (d == 0)
            throw std::invalid_argument("tensor dims must be nonzero");
        n *= d;
    }
    if (n != bytes.size())
        throw std::invalid_argument("tensor payload size does not match dims");
    Fp8Tensor t;
    t.format = fmt;
    t.dims = std::move(dims);
    t.elems.reserve(bytes.size());
    for (uint8_t b : bytes)
        t.elems.push_back(decode(b, fmt));
    t.bytes = std::move(bytes);
    return t;
}

std::vector<double> Fp8Tensor::to_reals() const {
    std::vector<double> out;
    out.reserve(elems.size());
    for (const Decoded& d : elems)
        out.push_back(to_real(d, format));
    return out;
}

} // namespace fp8cim
