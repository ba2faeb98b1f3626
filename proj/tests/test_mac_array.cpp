// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "fp8cim/mac_array.hpp"
#include "fp8cim/synthetic.hpp"
#include "oracles.hpp"

using namespace fp8cim;

TEST_CASE("weight decomposition: known slicings") {
    WeightSlices ws = decompose_weight(-1, 8);
    CHECK(ws.count == 4);
    CHECK(ws.slices[0] == 3);
    CHECK(ws.slices[1] == 3);
    CHECK(ws.slices[2] == 3);
    CHECK(ws.slices[3] == -1);   // only the top digit is signed
    CHECK(ws.snf(3));
    CHECK(!ws.snf(0));
    CHECK(ws.recompose() == -1);

    ws = decompose_weight(5, 4);
    CHECK(ws.count == 2);
    CHECK(ws.slices[0] == 1);
    CHECK(ws.slices[1] == 1);

    ws = decompose_weight(-8, 4);
    CHECK(ws.slices[0] == 0);
    CHECK(ws.slices[1] == -2);

    ws = decompose_weight(-2, 2);
    CHECK(ws.count == 1);
    CHECK(ws.slices[0] == -2);
}

TEST_CASE("weight decomposition: exhaustive recomposition") {
    for (int width : {2, 4, 6, 8}) {
        for (int w = -(1 << (width - 1)); w < (1 << (width - 1)); ++w) {
            WeightSlices ws = decompose_weight(w, width);
            CHECK(ws.recompose() == w);
            for (int j = 0; j < ws.count; ++j) {
                if (ws.snf(j)) {
                    CHECK(ws.slices[j] >= -2);
                    CHECK(ws.slices[j] <= 1);
                } else {
                    CHECK(ws.slices[j] >= 0);
                    CHECK(ws.slices[j] <= 3);
                }
            }
        }
    }
    CHECK_THROWS_AS(decompose_weight(0, 3), std::invalid_argument);
    CHECK_THROWS_AS(decompose_weight(8, 4), std::invalid_argument);
    CHECK_THROWS_AS(decompose_weight(-9, 4), std::invalid_argument);
}

TEST_CASE("column mac covers its documented range") {
    std::vector<int> ones(64, 1);
    std::vector<int8_t> threes(64, 3);
    CHECK(column_mac(ones, threes, false) == 192);
    std::vector<int8_t> minus2(64, -2);
    CHECK(column_mac(ones, minus2, true) == -128);
    std::vector<int> bits = {1, 0, 1};
    std::vector<int8_t> cells = {2, 3, 1};
    CHECK(column_mac(bits, cells, false) == 3);

    std::vector<int> bad_bits = {2};
    std::vector<int8_t> one_cell = {1};
    CHECK_THROWS_AS(column_mac(bad_bits, one_cell, false), std::invalid_argument);
    std::vector<int> one_bit = {1};
    std::vector<int8_t> neg_cell = {-1};
    CHECK_THROWS_AS(column_mac(one_bit, neg_cell, false), std::invalid_argument);
    std::vector<int8_t> big_cell = {2};
    CHECK_THROWS_AS(column_mac(one_bit, big_cell, true), std::invalid_argument);
    CHECK_THROWS_AS(column_mac(bits, one_cell, false), std::invalid_argument);
}

TEST_CASE("array geometry fuses 192 bits of columns") {
    ArrayConfig cfg;
    cfg.weight_width = 2;
    CHECK(cfg.channels() == 96);
    cfg.weight_width = 4;
    CHECK(cfg.channels() == 48);
    cfg.weight_width = 6;
    CHECK(cfg.channels() == 32);
    cfg.weight_width = 8;
    CHECK(cfg.channels() == 24);
}

TEST_CASE("6-bit weights fuse three columns with 4^j radix") {
    // One active input bit isolates the column recombination.
    std::vector<int32_t> x = {1, 1, 1};
    std::vector<int32_t> w = {-32, 21, 7};
    ArrayConfig cfg;
    cfg.weight_width = 6;
    cfg.input_width = 2;
    // Manual recombination per weight: col0 + (col1 << 2) + (col2 << 4).
    int64_t manual = 0;
    for (int32_t wi : w) {
        WeightSlices ws = decompose_weight(wi, 6);
        manual += ws.slices[0] + (ws.slices[1] << 2) + (ws.slices[2] << 4);
    }
    CHECK(manual == -32 + 21 + 7);
    CHECK(fused_mac(x, w, cfg) == manual);
}

TEST_CASE("fused mac equals the integer dot product") {
    std::mt19937_64 rng(9);
    for (int W : {2, 4, 6, 8}) {
        for (int I = 2; I <= 12; I += 2) {
            for (int it = 0; it < 500; ++it) {
                size_t n = 1 + oracle::bounded(rng, 64);
                std::vector<int32_t> x(n), w(n);
                for (size_t i = 0; i < n; ++i) {
                    x[i] = static_cast<int>(oracle::bounded(rng, 1u << I)) - (1 << (I - 1));
                    w[i] = static_cast<int>(oracle::bounded(rng, 1u << W)) - (1 << (W - 1));
                }
                ArrayConfig cfg;
                cfg.weight_width = W;
                cfg.input_width = I;
                CHECK(fused_mac(x, w, cfg) == oracle::dot(x, w));
            }
        }
    }
}

TEST_CASE("fused mac validation") {
    ArrayConfig cfg;
    std::vector<int32_t> x = {1, 2};
    std::vector<int32_t> w = {1};
    CHECK_THROWS_AS(fused_mac(x, w, cfg), std::invalid_argument);
    std::vector<int32_t> empty;
    CHECK_THROWS_AS(fused_mac(empty, empty, cfg), std::invalid_argument);
    std::vector<int32_t> long_x(65, 0), long_w(65, 0);
    CHECK_THROWS_AS(fused_mac(long_x, long_w, cfg), std::invalid_argument);
    cfg.weight_width = 3;
    std::vector<int32_t> one = {0};
    CHECK_THROWS_AS(fused_mac(one, one, cfg), std::invalid_argument);
    cfg.weight_width = 8;
    cfg.input_width = 13;
    CHECK_THROWS_AS(fused_mac(one, one, cfg), std::invalid_argument);
    cfg.input_width = 4;
    std::vector<int32_t> big = {8};   // does not fit 4-bit two's complement
    std::vector<int32_t> ok = {1};
    CHECK_THROWS_AS(fused_mac(big, ok, cfg), std::invalid_argument);
    CHECK_THROWS_AS(fused_mac(ok, std::vector<int32_t>{200}, cfg), std::invalid_argument);
}

TEST_CASE("macro mac is exact when bitwidths cover the data") {
    // Concentrated data: zero shifts everywhere, so b_fix 7/7 is lossless
    // for E4M3 (mantissa fits 4 bits).
    Fp8Tensor x = gen_synthetic(SynthDist::concentrated, Fp8Format::e4m3(), 256, 100);
    Fp8Tensor w = gen_synthetic(SynthDist::concentrated, Fp8Format::e4m3(), 256, 101);
    std::vector<Group> gx = partition(x);
    std::vector<Group> gw = partition(w);
    DsbpConfig icfg{64, 0, 7, OperandKind::input};
    DsbpConfig wcfg{64, 0, 7, OperandKind::weight};
    for (size_t g = 0; g < gx.size(); ++g) {
        MacroMacResult r = fp_macro_mac(gx[g], gw[g], icfg, wcfg, PipelineMode::fixed);
        CHECK(r.b_g_input == 7);
        CHECK(r.b_g_weight == 7);
        double exact = 0;
        for (size_t i = 0; i < gx[g].valid; ++i)
            exact += to_real(gx[g].elems[i], x.format) * to_real(gw[g].elems[i], w.format);
        CHECK(r.value == exact);
        CHECK(r.value == std::ldexp(static_cast<double>(r.acc), r.scale_exp));
    }
}

TEST_CASE("macro mac wires the units together faithfully") {
    Fp8Tensor x = gen_synthetic(SynthDist::outlier_heavy, Fp8Format::e4m3(), 512, 200);
    Fp8Tensor w = gen_synthetic(SynthDist::outlier_heavy, Fp8Format::e4m3(), 512, 201);
    std::vector<Group> gx = partition(x);
    std::vector<Group> gw = partition(w);
    DsbpConfig icfg{64, 4, 2, OperandKind::input};
    DsbpConfig wcfg{64, 4, 2, OperandKind::weight};
    for (size_t g = 0; g < gx.size(); ++g) {
        MacroMacResult r = fp_macro_mac(gx[g], gw[g], icfg, wcfg, PipelineMode::dynamic);
        CHECK(r.dynamic);
        // Input bitwidth comes from the MPU.
        ShiftProfile sp = shift_profile(gx[g]);
        MpuConfig mc;
        mc.k_quarters = 4;
        mc.b_fix = 2;
        CHECK(r.b_g_input == mpu_predict(sp.shifts, mc));
        // Weight bitwidth comes from the reference predictor.
        CHECK(r.b_g_weight ==
              predict_bitwidth(shift_profile(gw[g]), wcfg).b_g);
        // Input lanes equal the reference truncating alignment.
        GroupAlignment ref = align_group(gx[g], r.b_g_input, RoundingMode::truncate);
        CHECK(r.input_alignment.aligned == ref.aligned);
        // The accumulator is the plain dot of the aligned lanes.
        std::vector<int32_t> ax(r.input_alignment.aligned.begin(),
                                r.input_alignment.aligned.begin() + gx[g].valid);
        std::vector<int32_t> aw(r.weight_alignment.aligned.begin(),
                                r.weight_alignment.aligned.begin() + gw[g].valid);
        CHECK(r.acc == oracle::dot(ax, aw));
        CHECK(r.scale_exp ==
              r.input_alignment.scale_exp + r.weight_alignment.scale_exp);
        // Weight width is one of the legal slice widths.
        CHECK((r.b_g_weight == 1 || r.b_g_weight == 3 || r.b_g_weight == 5 ||
               r.b_g_weight == 7));
    }
}

TEST_CASE("macro mac validation") {
    Fp8Tensor x = gen_synthetic(SynthDist::concentrated, Fp8Format::e4m3(), 64, 1);
    Fp8Tensor w = gen_synthetic(SynthDist::concentrated, Fp8Format::e4m3(), 64, 2);
    Group gx = partition(x)[0];
    Group gw = partition(w)[0];
    DsbpConfig icfg{64, 0, 4, OperandKind::input};
    DsbpConfig wcfg{64, 0, 4, OperandKind::weight};
    CHECK_THROWS_AS(fp_macro_mac(gx, gw, wcfg, wcfg, PipelineMode::fixed),
                    std::invalid_argument);
    CHECK_THROWS_AS(fp_macro_mac(gx, gw, icfg, icfg, PipelineMode::fixed),
                    std::invalid_argument);
    Group short_w = gw;
    short_w.valid = 32;
    CHECK_THROWS_AS(fp_macro_mac(gx, short_w, icfg, wcfg, PipelineMode::fixed),
                    std::invalid_argument);
}
