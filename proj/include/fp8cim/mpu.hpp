// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace fp8cim {

// Bitwidth-prediction unit datapath parameters. frac_bits is the stage-1/2
// fixed-point resolution, lut_bits the reciprocal table input width,
// sat_bits the unsigned integer width the stage-3 accumulator saturates to.
struct MpuConfig {
    int frac_bits = 15;
    int lut_bits = 8;
    int k_quarters = 0;     // k = k_quarters / 4
    int b_fix = 0;
    int sat_bits = 5;
};

// Per-stage intermediate values for one prediction.
struct MpuTrace {
    std::vector<int64_t> num_terms;   // stage 1: (shift << F) >> shift
    std::vector<int64_t> den_terms;   // stage 1: (1 << F) >> shift
    int64_t num = 0;                  // stage 2 adder-tree sums
    int64_t den = 0;
    bool den_underflow = false;       // every den term shifted to zero
    int lead_pos = 0;                 // stage 3: leading-one position of den
    int lut_index = 0;
    int recip = 0;                    // LUT entry, 7 fractional bits
    int64_t ratio_q = 0;              // num/den in Q16
    int64_t result = 0;               // k*ratio + b_fix in Q18, post saturation
    int b_g = 0;
    void dump(std::ostream& os) const;
};

// entry[i] = round(2^15 / (256 + i)), 7 fractional bits, so entry[0] = 128
// and entry[255] = 64.
std::array<uint8_t, 256> build_reciprocal_lut();

// Fixed-point bitwidth prediction over one group's shifts (1..64 lanes,
// pads excluded by the caller). Output is clamped to the legal input
// bitwidth range [1,11]. When every denominator term underflows the result
// falls back to b_fix alone and the trace flags den_underflow.
int mpu_predict(std::span<const int> shifts, const MpuConfig& cfg, MpuTrace* trace = nullptr);

} // namespace fp8cim
