// SPDX-License-Identifier: Apache-2.0
#include "fp8cim/fiau.hpp"

#include <stdexcept>

namespace fp8cim {

namespace {

void check_args(int32_t mantissa, int width_in, int exp_offset, int save_len) {
    if (width_in < 2 || width_in > 31)
        throw std::invalid_argument("fiau: width_in out of range");
    if (save_len < 1 || save_len > 31)
        throw std::invalid_argument("fiau: save_len out of range");
    if (exp_offset < 0)
        throw std::invalid_argument("fiau: exp_offset must be nonnegative");
    int64_t lo = -(int64_t{1} << (width_in - 1));
    int64_t hi = (int64_t{1} << (width_in - 1)) - 1;
    if (mantissa < lo || mantissa > hi)
        throw std::invalid_argument("fiau: mantissa does not fit width_in");
}

} // namespace

int32_t fiau_align(int32_t mantissa, int width_in, int exp_offset, int save_len) {
    check_args(mantissa, width_in, exp_offset, save_len);
    // Holding the sign for exp_offset+1 cycles in a save_len window is a
    // floor-division by 2^(width_in + exp_offset - save_len).
    int sh = save_len - width_in - exp_offset;
    int64_t v = mantissa;
    int64_t out = sh >= 0 ? v << sh : v >> -sh;   // arithmetic shift: floor
    return static_cast<int32_t>(out);
}

int32_t fiau_align_stepped(int32_t mantissa, int width_in, int exp_offset, int save_len,
                           std::vector<FiauCycle>* trace) {
    check_args(mantissa, width_in, exp_offset, save_len);
    // Write phase: FIFO slot 0 holds the sign bit, slot width_in-1 the LSB.
    std::vector<int> fifo(width_in);
    uint32_t u = static_cast<uint32_t>(mantissa);
    for (int i = 0; i < width_in; ++i)
        fifo[i] = (u >> (width_in - 1 - i)) & 1;

    // Read phase: r_ptr stays on the sign slot through cycle exp_offset,
    // then advances; past the write pointer the FIFO reads as zero.
    int64_t out = 0;
    int r_ptr = 0;
    for (int c = 0; c < save_len; ++c) {
        int bit = r_ptr < width_in ? fifo[r_ptr] : 0;
        out = (out << 1) | bit;
        if (trace)
            trace->push_back(FiauCycle{c, r_ptr, bit});
        if (c >= exp_offset)
            ++r_ptr;
    }
    // Captured bits are save_len-wide two's complement.
    if (out & (int64_t{1} << (save_len - 1)))
        out -= int64_t{1} << save_len;
    return static_cast<int32_t>(out);
}

std::vector<int32_t> fiau_align_group(std::span<const int32_t> mantissas,
                                      std::span<const int> exps, int width_in,
                                      int e_max, int b_g) {
    if (mantissas.size() != exps.size())
        throw std::invalid_argument("fiau: mantissa/exponent count mismatch");
    if (b_g < 1)
        throw std::invalid_argument("fiau: b_g must be >= 1");
    std::vector<int32_t> out;
    out.reserve(mantissas.size());
    for (size_t i = 0; i < mantissas.size(); ++i) {
        if (exps[i] > e_max)
            throw std::invalid_argument("fiau: exponent above group maximum");
        out.push_back(fiau_align(mantissas[i], width_in, e_max - exps[i], b_g + 1));
    }
    return out;
}

} // namespace fp8cim
