// SPDX-License-Identifier: Apache-2.0
#include "fp8cim/dsbp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fp8cim {

namespace {

constexpr Decoded kZeroPad{1, 0, 0, true};

int64_t ceil_div(int64_t num, int64_t den) {
    return (num + den - 1) / den;
}

// Signed scale by 2^ex with the requested rounding. Left shifts are exact.
int64_t scale_signed(int sign, int64_t mag, int ex, RoundingMode mode) {
    if (ex >= 0)
        return sign * (mag << ex);
    int sh = -ex;
    if (mode == RoundingMode::truncate)
        return (sign * mag) >> sh;          // arithmetic shift: floor
    int64_t rounded = (mag + (int64_t{1} << (sh - 1))) >> sh;
    return sign * rounded;                  // half away from zero
}

} // namespace

std::vector<Group> partition(const Fp8Tensor& t, int group_size) {
    if (group_size <= 0)
        throw std::invalid_argument("group_size must be positive");
    size_t row_len = t.last_dim();
    size_t rows = t.size() / row_len;
    size_t groups_per_row = (row_len + group_size - 1) / group_size;
    std::vector<Group> out;
    out.reserve(rows * groups_per_row);
    for (size_t r = 0; r < rows; ++r) {
        for (size_t g = 0; g < groups_per_row; ++g) {
            size_t begin = r * row_len + g * group_size;
            size_t valid = std::min<size_t>(group_size, row_len - g * group_size);
            Group grp;
            grp.format = t.format;
            grp.valid = valid;
            grp.elems.assign(t.elems.begin() + begin, t.elems.begin() + begin + valid);
            grp.elems.resize(group_size, kZeroPad);
            out.push_back(std::move(grp));
        }
    }
    return out;
}

ShiftProfile shift_profile(const Group& g) {
    if (g.valid == 0)
        throw std::invalid_argument("group has no valid elements");
    ShiftProfile sp;
    sp.e_max = 0;
    for (size_t i = 0; i < g.valid; ++i)
        sp.e_max = std::max(sp.e_max, g.elems[i].e_raw);
    sp.shifts.reserve(g.valid);
    for (size_t i = 0; i < g.valid; ++i)
        sp.shifts.push_back(sp.e_max - g.elems[i].e_raw);
    return sp;
}

int round_to_valid_bitwidth(int64_t quarters, OperandKind kind) {
    if (kind == OperandKind::input) {
        int64_t b = ceil_div(quarters, 4);
        return static_cast<int>(std::clamp<int64_t>(b, kInputBitwidthMin, kInputBitwidthMax));
    }
    int best = kWeightBitwidths[0];
    int64_t best_dist = std::numeric_limits<int64_t>::max();
    for (int cand : kWeightBitwidths) {
        int64_t dist = std::abs(quarters - int64_t{cand} * 4);
        if (dist < best_dist || (dist == best_dist && cand > best)) {
            best_dist = dist;
            best = cand;
        }
    }
    return best;
}

BitwidthPrediction predict_bitwidth(const ShiftProfile& sp, const DsbpConfig& cfg) {
    if (sp.shifts.empty())
        throw std::invalid_argument("empty shift profile");
    if (cfg.k_quarters < 0 || cfg.b_fix < 0)
        throw std::invalid_argument("k and b_fix must be nonnegative");
    // Weighted average with w_i = 2^-shift_i, evaluated exactly: scale both
    // sides by 2^max_shift. Shifts are bounded by the exponent field, so the
    // sums stay far below 63 bits.
    int max_shift = *std::max_element(sp.shifts.begin(), sp.shifts.end());
    int64_t num = 0;
    int64_t den = 0;
    for (int s : sp.shifts) {
        num += int64_t{s} << (max_shift - s);
        den += int64_t{1} << (max_shift - s);
    }
    BitwidthPrediction p;
    p.b_dyn = static_cast<int>(ceil_div(num, den));
    p.b_g = round_to_valid_bitwidth(int64_t{cfg.k_quarters} * p.b_dyn + int64_t{cfg.b_fix} * 4,
                                    cfg.kind);
    return p;
}

GroupAlignment align_group(const Group& g, int b_g, RoundingMode mode, bool literal_alg1) {
    if (b_g < 1 || b_g > 24)
        throw std::invalid_argument("aligned bitwidth must be in [1,24]");
    ShiftProfile sp = shift_profile(g);
    GroupAlignment a;
    a.e_max = sp.e_max;
    a.b_g = b_g;
    a.valid = g.valid;
    a.aligned.assign(g.elems.size(), 0);
    int m = g.format.mant_bits;
    int top = literal_alg1 ? b_g : b_g - 1;
    a.scale_exp = a.e_max - g.format.bias - top;
    // Saturation bound of the magnitude container: b_g bits by default, one
    // extra in the literal formulation.
    int64_t sat = (int64_t{1} << (literal_alg1 ? b_g + 1 : b_g)) - 1;
    for (size_t i = 0; i < g.valid; ++i) {
        const Decoded& d = g.elems[i];
        int ex = top - m - sp.shifts[i];
        int64_t v = scale_signed(d.sign, d.align_sig(), ex, mode);
        if (mode == RoundingMode::half_away_from_zero)
            v = std::clamp(v, -sat, sat);
        a.aligned[i] = static_cast<int32_t>(v);
    }
    return a;
}

std::vector<double> reconstruct(const GroupAlignment& a) {
    std::vector<double> out;
    out.reserve(a.valid);
    for (size_t i = 0; i < a.valid; ++i)
        out.push_back(std::ldexp(static_cast<double>(a.aligned[i]), a.scale_exp));
    return out;
}

QuantizedTensor quantize_tensor(const Fp8Tensor& t, const DsbpConfig& cfg, RoundingMode mode) {
    QuantizedTensor q;
    q.groups = partition(t, cfg.group_size);
    q.alignments.reserve(q.groups.size());
    double bits = 0;
    for (const Group& g : q.groups) {
        BitwidthPrediction p = predict_bitwidth(shift_profile(g), cfg);
        GroupAlignment a = align_group(g, p.b_g, mode);
        a.b_dyn = p.b_dyn;
        bits += p.b_g + 1;
        q.alignments.push_back(std::move(a));
    }
    q.avg_bitwidth = bits / q.groups.size();
    return q;
}

std::vector<double> reconstruct(const QuantizedTensor& q) {
    std::vector<double> out;
    for (const GroupAlignment& a : q.alignments) {
        std::vector<double> part = reconstruct(a);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

double sqnr_db(std::span<const double> original, std::span<const double> reconstructed) {
    if (original.size() != reconstructed.size())
        throw std::invalid_argument("sqnr: length mismatch");
    if (original.empty())
        throw std::invalid_argument("sqnr: empty signal");
    double sig = 0;
    double err = 0;
    for (size_t i = 0; i < original.size(); ++i) {
        sig += original[i] * original[i];
        double d = original[i] - reconstructed[i];
        err += d * d;
    }
    if (sig == 0)
        throw std::invalid_argument("sqnr: all-zero signal");
    if (err == 0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(sig / err);
}

} // namespace fp8cim
