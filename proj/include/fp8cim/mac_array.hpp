// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "fp8cim/dsbp.hpp"
#include "fp8cim/mpu.hpp"

namespace fp8cim {

// Signed weight split into 2-bit columns, least significant first. Only the
// top column is signed (the sign-extension-free encoding); the rest are
// plain unsigned radix-4 digits.
struct WeightSlices {
    std::array<int8_t, 4> slices{};
    int count = 0;
    int width = 0;
    bool snf(int j) const { return j == count - 1; }
    int recompose() const;
};

// width must be one of {2,4,6,8}; w must fit width-bit two's complement.
WeightSlices decompose_weight(int w, int width);

// Array geometry: 64 rows by 96 physical columns of 2-bit cells. A w-bit
// weight occupies w/2 adjacent columns, so the array fuses into 192/w
// output channels.
struct ArrayConfig {
    static constexpr int rows = 64;
    static constexpr int columns = 96;
    int weight_width = 8;
    int input_width = 8;
    int channels() const { return 2 * columns / weight_width; }
};

// One column of cells against one serial input bit plane. Cells are signed
// digits in [-2,1] when snf is set, unsigned in [0,3] otherwise; result is
// in [-128, 192] for 64 rows.
int column_mac(std::span<const int> input_bits, std::span<const int8_t> cells, bool snf);

// Full multi-bit dot product: weights are column-decomposed, inputs stream
// MSB first with the top plane subtracted, columns fuse with 4^j radix
// weights. Equals the plain integer dot product exactly.
int64_t fused_mac(std::span<const int32_t> inputs, std::span<const int32_t> weights,
                  const ArrayConfig& cfg);

enum class PipelineMode { fixed, dynamic };

struct MacroMacResult {
    double value = 0;           // acc * 2^scale_exp
    int64_t acc = 0;
    int scale_exp = 0;
    int b_g_input = 0;
    int b_g_weight = 0;
    GroupAlignment input_alignment;
    GroupAlignment weight_alignment;
    MpuTrace mpu;               // populated in dynamic mode
    bool dynamic = false;
};

// End-to-end group MAC: weights take the reference predictor and rounded
// alignment (offline path), inputs take the MPU (dynamic) or b_fix (fixed)
// bitwidth and the serial truncating alignment, then the array multiplies.
MacroMacResult fp_macro_mac(const Group& x, const Group& w, const DsbpConfig& input_cfg,
                            const DsbpConfig& weight_cfg, PipelineMode mode);

} // namespace fp8cim
