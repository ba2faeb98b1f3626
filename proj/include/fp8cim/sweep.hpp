// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fp8cim/mac_array.hpp"
#include "fp8cim/perf.hpp"

namespace fp8cim {

// Sweep grid. k is carried in quarter steps; fixed mode forces k = 0.
struct SweepSpec {
    std::vector<int> k_quarters;
    std::vector<int> b_fix_input;
    std::vector<int> b_fix_weight;
    PipelineMode mode = PipelineMode::dynamic;
    uint64_t seed = 0;      // synthetic data generation, when the caller has no tensors
};

struct SweepRow {
    int config_id = 0;
    double k = 0;
    int b_fix_input = 0;
    int b_fix_weight = 0;
    double avg_i = 0;       // mean aligned input bitwidth, sign included
    double avg_w = 0;
    double sqnr_db = 0;     // group MAC outputs vs exact dot products
    double throughput = 0;
    double efficiency = 0;
    bool pareto = false;
};

// Perf-only row assembly, exposed so measured average bitwidths can be
// injected without running the MAC pipeline.
SweepRow make_sweep_row(int config_id, int k_quarters, int b_fix_input, int b_fix_weight,
                        PipelineMode mode, double avg_i, double avg_w, double sqnr,
                        const PerfCalibration& cal);

// Runs the full alignment+MAC pipeline per 64-element group pair for every
// grid point. Tensors must share dims; config ids count k-major, then
// b_fix_input, then b_fix_weight. Rows come back sorted by config id with
// pareto flags set.
std::vector<SweepRow> run_sweep(const Fp8Tensor& inputs, const Fp8Tensor& weights,
                                const SweepSpec& spec, const PerfCalibration& cal);

// Sets row.pareto: true iff no other row has sqnr_db >= and efficiency >=
// with at least one strict.
void pareto_filter(std::vector<SweepRow>& rows);

// Header plus one line per row, 6 significant digits, "inf" for lossless.
std::string to_csv(const std::vector<SweepRow>& rows);

} // namespace fp8cim
