// SPDX-License-Identifier: Apache-2.0
#include "fp8cim/mac_array.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fp8cim/fiau.hpp"

namespace fp8cim {

int WeightSlices::recompose() const {
    int v = 0;
    for (int j = 0; j < count; ++j)
        v += slices[j] << (2 * j);
    return v;
}

WeightSlices decompose_weight(int w, int width) {
    if (width < 2 || width > 8 || width % 2 != 0)
        throw std::invalid_argument("weight width must be one of {2,4,6,8}");
    int lo = -(1 << (width - 1));
    int hi = (1 << (width - 1)) - 1;
    if (w < lo || w > hi)
        throw std::invalid_argument("weight does not fit its width");
    WeightSlices ws;
    ws.width = width;
    ws.count = width / 2;
    unsigned u = static_cast<unsigned>(w) & ((1u << width) - 1);
    for (int j = 0; j < ws.count; ++j) {
        int d = (u >> (2 * j)) & 3;
        if (j == ws.count - 1 && d >= 2)
            d -= 4;                     // top digit carries the sign
        ws.slices[j] = static_cast<int8_t>(d);
    }
    return ws;
}

int column_mac(std::span<const int> input_bits, std::span<const int8_t> cells, bool snf) {
    if (input_bits.size() != cells.size() || input_bits.size() > ArrayConfig::rows)
        throw std::invalid_argument("column_mac: need matching spans of <= 64 rows");
    int acc = 0;
    for (size_t i = 0; i < input_bits.size(); ++i) {
        int b = input_bits[i];
        int c = cells[i];
        if (b != 0 && b != 1)
            throw std::invalid_argument("column_mac: input bits must be 0/1");
        if (snf ? (c < -2 || c > 1) : (c < 0 || c > 3))
            throw std::invalid_argument("column_mac: cell digit out of range");
        acc += b * c;
    }
    return acc;
}

int64_t fused_mac(std::span<const int32_t> inputs, std::span<const int32_t> weights,
                  const ArrayConfig& cfg) {
    if (inputs.size() != weights.size())
        throw std::invalid_argument("fused_mac: operand count mismatch");
    if (inputs.empty() || inputs.size() > ArrayConfig::rows)
        throw std::invalid_argument("fused_mac: need 1..64 rows");
    int W = cfg.weight_width;
    int I = cfg.input_width;
    if (W < 2 || W > 8 || W % 2 != 0)
        throw std::invalid_argument("fused_mac: weight width must be one of {2,4,6,8}");
    if (I < 2 || I > 12)
        throw std::invalid_argument("fused_mac: input width must be in [2,12]");
    int64_t ilo = -(int64_t{1} << (I - 1));
    int64_t ihi = (int64_t{1} << (I - 1)) - 1;
    for (int32_t x : inputs)
        if (x < ilo || x > ihi)
            throw std::invalid_argument("fused_mac: input does not fit its width");

    size_t n = inputs.size();
    int ncol = W / 2;
    std::vector<std::vector<int8_t>> cells(ncol, std::vector<int8_t>(n));
    for (size_t i = 0; i < n; ++i) {
        WeightSlices ws = decompose_weight(weights[i], W);   // validates range
        for (int j = 0; j < ncol; ++j)
            cells[j][i] = ws.slices[j];
    }

    // Serial MSB-first accumulation: shift left, add the plane, subtract the
    // top plane (two's-complement input weighting).
    std::vector<int> bits(n);
    int64_t acc = 0;
    for (int t = I - 1; t >= 0; --t) {
        for (size_t i = 0; i < n; ++i)
            bits[i] = (static_cast<uint32_t>(inputs[i]) >> t) & 1;
        int64_t plane = 0;
        for (int j = 0; j < ncol; ++j)
            plane += int64_t{column_mac(bits, cells[j], j == ncol - 1)} << (2 * j);
        acc = 2 * acc + (t == I - 1 ? -plane : plane);
    }
    return acc;
}

MacroMacResult fp_macro_mac(const Group& x, const Group& w, const DsbpConfig& input_cfg,
                            const DsbpConfig& weight_cfg, PipelineMode mode) {
    if (x.valid != w.valid)
        throw std::invalid_argument("fp_macro_mac: group sizes differ");
    if (input_cfg.kind != OperandKind::input || weight_cfg.kind != OperandKind::weight)
        throw std::invalid_argument("fp_macro_mac: config kinds are swapped");

    MacroMacResult r;
    r.dynamic = mode == PipelineMode::dynamic;

    // Weights: reference predictor, rounded alignment (offline path).
    ShiftProfile wp = shift_profile(w);
    BitwidthPrediction wpred = predict_bitwidth(wp, weight_cfg);
    r.b_g_weight = wpred.b_g;
    r.weight_alignment = align_group(w, wpred.b_g, RoundingMode::half_away_from_zero);
    r.weight_alignment.b_dyn = wpred.b_dyn;

    // Inputs: MPU or b_fix bitwidth, serial truncating alignment.
    ShiftProfile xp = shift_profile(x);
    if (mode == PipelineMode::dynamic) {
        MpuConfig mc;
        mc.k_quarters = input_cfg.k_quarters;
        mc.b_fix = input_cfg.b_fix;
        r.b_g_input = mpu_predict(xp.shifts, mc, &r.mpu);
    } else {
        r.b_g_input = round_to_valid_bitwidth(int64_t{input_cfg.b_fix} * 4, OperandKind::input);
    }

    int m = x.format.mant_bits;
    std::vector<int32_t> mants(x.valid);
    std::vector<int> exps(x.valid);
    for (size_t i = 0; i < x.valid; ++i) {
        const Decoded& d = x.elems[i];
        mants[i] = d.sign * d.align_sig();
        exps[i] = d.e_raw;
    }
    std::vector<int32_t> ax = fiau_align_group(mants, exps, m + 2, xp.e_max, r.b_g_input);

    r.input_alignment.e_max = xp.e_max;
    r.input_alignment.b_g = r.b_g_input;
    r.input_alignment.valid = x.valid;
    r.input_alignment.scale_exp = xp.e_max - x.format.bias - (r.b_g_input - 1);
    r.input_alignment.aligned.assign(x.elems.size(), 0);
    std::copy(ax.begin(), ax.end(), r.input_alignment.aligned.begin());

    ArrayConfig cfg;
    cfg.weight_width = r.b_g_weight + 1;
    cfg.input_width = r.b_g_input + 1;
    std::span<const int32_t> aw(r.weight_alignment.aligned.data(), x.valid);
    r.acc = fused_mac(ax, aw, cfg);
    r.scale_exp = r.input_alignment.scale_exp + r.weight_alignment.scale_exp;
    r.value = std::ldexp(static_cast<double>(r.acc), r.scale_exp);
    return r;
}

} // namespace fp8cim
