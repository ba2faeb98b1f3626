// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fp8cim {

// Serial two's-complement alignment: a width_in-bit mantissa enters a FIFO
// MSB first; the read pointer holds on the sign bit for exp_offset+1 cycles,
// then walks the payload, padding zeros once it passes the write pointer.
// The save_len bits captured equal
//   floor(mantissa * 2^(save_len - width_in - exp_offset))
// as a save_len-bit two's-complement value.
int32_t fiau_align(int32_t mantissa, int width_in, int exp_offset, int save_len);

// One FIFO read step. bit is what the output shift register captured.
struct FiauCycle {
    int cycle;
    int r_ptr;
    int bit;
};

// Cycle-stepped model of the same hardware; fills `trace` with one entry per
// output cycle when provided.
int32_t fiau_align_stepped(int32_t mantissa, int width_in, int exp_offset, int save_len,
                           std::vector<FiauCycle>* trace = nullptr);

// Group alignment as driven by the bitwidth predictor: element i uses
// exp_offset = e_max - exps[i] and save_len = b_g + 1. With
// width_in = mant_bits + 2 this reproduces the reference truncation
// alignment bit for bit.
std::vector<int32_t> fiau_align_group(std::span<const int32_t> mantissas,
                                      std::span<const int> exps, int width_in,
                                      int e_max, int b_g);

} // namespace fp8cim
