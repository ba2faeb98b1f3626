// SPDX-License-Identifier: Apache-2.0
#include "fp8cim/mpu.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <stdexcept>

#include "fp8cim/dsbp.hpp"

namespace fp8cim {

namespace {
constexpr int kRatioFracBits = 16;   // Q of the divider output
}

std::array<uint8_t, 256> build_reciprocal_lut() {
    std::array<uint8_t, 256> lut{};
    for (int i = 0; i < 256; ++i) {
        int d = 256 + i;
        lut[i] = static_cast<uint8_t>(((1 << 15) + d / 2) / d);
    }
    return lut;
}

int mpu_predict(std::span<const int> shifts, const MpuConfig& cfg, MpuTrace* trace) {
    if (shifts.empty() || shifts.size() > 64)
        throw std::invalid_argument("mpu: lane count must be in [1,64]");
    if (cfg.k_quarters < 0 || cfg.b_fix < 0)
        throw std::invalid_argument("mpu: k and b_fix must be nonnegative");
    const int F = cfg.frac_bits;

    MpuTrace local;
    MpuTrace& tr = trace ? *trace : local;
    tr = MpuTrace{};

    // Stage 1: weight each lane by 2^-shift with a plain right shift. The
    // numerator term keeps more bits than the denominator term, so den can
    // underflow to zero while num does not.
    for (int s : shifts) {
        if (s < 0 || s > 63)
            throw std::invalid_argument("mpu: shift out of range");
        int64_t num_t = (int64_t{s} << F) >> s;
        int64_t den_t = s > F ? 0 : (int64_t{1} << F) >> s;
        if (trace) {
            tr.num_terms.push_back(num_t);
            tr.den_terms.push_back(den_t);
        }
        tr.num += num_t;
        tr.den += den_t;
    }

    int64_t result;
    if (tr.den == 0) {
        // No representable average: clock-gate the divider, emit b_fix.
        tr.den_underflow = true;
        tr.ratio_q = 0;
        result = int64_t{cfg.b_fix} << (kRatioFracBits + 2);
    } else {
        // Stage 3: normalize den to [256,512), look up 1/den, multiply.
        static const std::array<uint8_t, 256> lut = build_reciprocal_lut();
        tr.lead_pos = 63 - std::countl_zero(static_cast<uint64_t>(tr.den));
        int64_t normalized = tr.lead_pos >= cfg.lut_bits
                                 ? tr.den >> (tr.lead_pos - cfg.lut_bits)
                                 : tr.den << (cfg.lut_bits - tr.lead_pos);
        tr.lut_index = static_cast<int>(normalized - (1 << cfg.lut_bits));
        tr.recip = lut[tr.lut_index];
        // 1/den ~ recip * 2^-(7 + lead_pos); bring num*recip to Q16.
        int64_t prod = tr.num * tr.recip;
        int sh = kRatioFracBits - 7 - tr.lead_pos;
        tr.ratio_q = sh >= 0 ? prod << sh : prod >> -sh;
        result = tr.ratio_q * cfg.k_quarters + (int64_t{cfg.b_fix} << (kRatioFracBits + 2));
    }

    // Saturate to sat_bits integer bits, then take the ceiling.
    int64_t cap = (int64_t{1} << (cfg.sat_bits + kRatioFracBits + 2)) - 1;
    result = std::min(result, cap);
    tr.result = result;
    int64_t up = (result + (int64_t{1} << (kRatioFracBits + 2)) - 1) >> (kRatioFracBits + 2);
    tr.b_g = static_cast<int>(std::clamp<int64_t>(up, kInputBitwidthMin, kInputBitwidthMax));
    return tr.b_g;
}

void MpuTrace::dump(std::ostream& os) const {
    os << "stage1 lanes=" << num_terms.size() << "\n  num_terms:";
    for (int64_t v : num_terms)
        os << ' ' << v;
    os << "\n  den_terms:";
    for (int64_t v : den_terms)
        os << ' ' << v;
    os << "\nstage2 num=" << num << " den=" << den;
    if (den_underflow) {
        os << " (underflow: fallback to b_fix)\n";
    } else {
        os << "\nstage3 lead_pos=" << lead_pos << " lut_index=" << lut_index
           << " recip=" << recip << " ratio_q16=" << ratio_q << "\n";
    }
    os << "result_q18=" << result << " b_g=" << b_g << "\n";
}

} // namespace fp8cim
