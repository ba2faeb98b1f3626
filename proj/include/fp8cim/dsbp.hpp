// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fp8cim/fp8.hpp"

namespace fp8cim {

enum class OperandKind { weight, input };
enum class RoundingMode { half_away_from_zero, truncate };

// Dynamic-shifting bitwidth prediction parameters. k is carried in quarter
// steps so every configuration stays exactly representable.
struct DsbpConfig {
    int group_size = 64;
    int k_quarters = 0;     // k = k_quarters / 4
    int b_fix = 0;
    OperandKind kind = OperandKind::weight;
};

// Hardware-legal aligned bitwidths (sign bit excluded).
inline constexpr int kWeightBitwidths[] = {1, 3, 5, 7};
inline constexpr int kInputBitwidthMin = 1;
inline constexpr int kInputBitwidthMax = 11;

// One reduction group. elems has exactly group_size entries; indices past
// `valid` are zero pads and never contribute to the shift profile.
struct Group {
    Fp8Format format;
    std::vector<Decoded> elems;
    size_t valid = 0;
};

// Per-element exponent distances from the group maximum, valid lanes only.
struct ShiftProfile {
    int e_max = 0;          // max biased exponent field over valid lanes
    std::vector<int> shifts;
};

struct GroupAlignment {
    int e_max = 0;
    int b_dyn = 0;          // ceil of the weighted shift average, before k/b_fix
    int b_g = 0;            // final aligned bitwidth (sign bit excluded)
    int scale_exp = 0;      // value_i ~ aligned[i] * 2^scale_exp
    size_t valid = 0;
    std::vector<int32_t> aligned;
};

// Splits along the last axis into ceil(last_dim / group_size) groups per row,
// zero-padding the tail group.
std::vector<Group> partition(const Fp8Tensor& t, int group_size = 64);

ShiftProfile shift_profile(const Group& g);

// Nearest legal weight bitwidth (ties round up) or ceil-clamped input
// bitwidth. `quarters` is the raw predicted bitwidth in quarter steps.
int round_to_valid_bitwidth(int64_t quarters, OperandKind kind);

struct BitwidthPrediction {
    int b_dyn;
    int b_g;
};

// Exact-rational evaluation of the weighted-average shift: with
// w_i = 2^-shift_i, B_dyn = ceil(sum(shift_i*w_i) / sum(w_i)) and
// B_g = round_to_valid(k*B_dyn + b_fix).
BitwidthPrediction predict_bitwidth(const ShiftProfile& sp, const DsbpConfig& cfg);

// Shifts each element's align_sig so the group shares scale 2^scale_exp with
// scale_exp = e_max - bias - (b_g - 1). half_away_from_zero saturates at
// +/-(2^b_g - 1); truncate floors the signed value and spans the full
// (b_g+1)-bit two's complement range [-2^b_g, 2^b_g - 1], matching the
// serial alignment hardware. literal_alg1 instead keeps exponent
// b_g - mant_bits - shift in a (b_g+2)-bit container with
// scale_exp = e_max - bias - b_g; it equals the default at b_g+1.
// b_g is capped at 24 so aligned values stay well inside int32.
GroupAlignment align_group(const Group& g, int b_g,
                           RoundingMode mode = RoundingMode::half_away_from_zero,
                           bool literal_alg1 = false);

// Reconstructed real values, valid lanes only.
std::vector<double> reconstruct(const GroupAlignment& a);

struct QuantizedTensor {
    std::vector<Group> groups;
    std::vector<GroupAlignment> alignments;
    double avg_bitwidth = 0;    // mean b_g + 1 sign bit
};

QuantizedTensor quantize_tensor(const Fp8Tensor& t, const DsbpConfig& cfg,
                                RoundingMode mode = RoundingMode::half_away_from_zero);

// Reconstruction of every element in original order.
std::vector<double> reconstruct(const QuantizedTensor& q);

// 10*log10(sum(orig^2)/sum((orig-recon)^2)); +inf when lossless. Throws on
// length mismatch, empty or all-zero original.
double sqnr_db(std::span<const double> original, std::span<const double> reconstructed);

} // namespace fp8cim
