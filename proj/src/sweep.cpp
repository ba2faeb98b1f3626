// SPDX-License-Identifier: Apache-2.0
#include "fp8cim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace {

std::string fmt6(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

namespace fp8cim {

SweepRow make_sweep_row(int config_id, int k_quarters, int b_fix_input, int b_fix_weight,
                        PipelineMode mode, double avg_i, double avg_w, double sqnr,
                        const PerfCalibration& cal) {
    SweepRow r;
    r.config_id = config_id;
    r.k = k_quarters / 4.0;
    r.b_fix_input = b_fix_input;
    r.b_fix_weight = b_fix_weight;
    r.avg_i = avg_i;
    r.avg_w = avg_w;
    r.sqnr_db = sqnr;
    PerfReport p = estimate(avg_i, avg_w,
                            mode == PipelineMode::dynamic ? PerfMode::dynamic_fp
                                                          : PerfMode::fixed_fp,
                            cal);
    r.throughput = p.throughput;
    r.efficiency = p.efficiency;
    return r;
}

std::vector<SweepRow> run_sweep(const Fp8Tensor& inputs, const Fp8Tensor& weights,
                                const SweepSpec& spec, const PerfCalibration& cal) {
    if (inputs.dims != weights.dims)
        throw std::invalid_argument("run_sweep: input/weight shapes differ");
    if (spec.k_quarters.empty() || spec.b_fix_input.empty() || spec.b_fix_weight.empty())
        throw std::invalid_argument("run_sweep: empty grid axis");
    if (spec.mode == PipelineMode::fixed)
        for (int kq : spec.k_quarters)
            if (kq != 0)
                throw std::invalid_argument("run_sweep: fixed mode forces k = 0");

    std::vector<Group> gx = partition(inputs);
    std::vector<Group> gw = partition(weights);

    // Exact reference: wide-float dot product per group.
    std::vector<double> exact(gx.size());
    for (size_t g = 0; g < gx.size(); ++g) {
        double dot = 0;
        for (size_t i = 0; i < gx[g].valid; ++i)
            dot += to_real(gx[g].elems[i], inputs.format) *
                   to_real(gw[g].elems[i], weights.format);
        exact[g] = dot;
    }

    std::vector<SweepRow> rows;
    int id = 0;
    std::vector<double> got(gx.size());
    for (int kq : spec.k_quarters) {
        for (int bfi : spec.b_fix_input) {
            for (int bfw : spec.b_fix_weight) {
                DsbpConfig icfg{64, kq, bfi, OperandKind::input};
                DsbpConfig wcfg{64, kq, bfw, OperandKind::weight};
                double bits_i = 0;
                double bits_w = 0;
                for (size_t g = 0; g < gx.size(); ++g) {
                    MacroMacResult r = fp_macro_mac(gx[g], gw[g], icfg, wcfg, spec.mode);
                    got[g] = r.value;
                    bits_i += r.b_g_input + 1;
                    bits_w += r.b_g_weight + 1;
                }
                rows.push_back(make_sweep_row(id++, kq, bfi, bfw, spec.mode,
                                              bits_i / gx.size(), bits_w / gx.size(),
                                              sqnr_db(exact, got), cal));
            }
        }
    }
    pareto_filter(rows);
    return rows;
}

void pareto_filter(std::vector<SweepRow>& rows) {
    if (rows.empty())
        throw std::invalid_argument("pareto_filter: no rows");
    for (SweepRow& r : rows) {
        r.pareto = true;
        for (const SweepRow& o : rows) {
            bool ge = o.sqnr_db >= r.sqnr_db && o.efficiency >= r.efficiency;
            bool strict = o.sqnr_db > r.sqnr_db || o.efficiency > r.efficiency;
            if (ge && strict) {
                r.pareto = false;
                break;
            }
        }
    }
}

std::string to_csv(const std::vector<SweepRow>& rows) {
    std::vector<const SweepRow*> sorted;
    sorted.reserve(rows.size());
    for (const SweepRow& r : rows)
        sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const SweepRow* a, const SweepRow* b) { return a->config_id < b->config_id; });
    std::string out =
        "config_id,k,b_fix_input,b_fix_weight,avg_i,avg_w,sqnr_db,"
        "throughput_tflops,efficiency_tflops_w,pareto\n";
    for (const SweepRow* r : sorted) {
        out += std::to_string(r->config_id) + ',' + fmt6(r->k) + ',' +
               std::to_string(r->b_fix_input) + ',' + std::to_string(r->b_fix_weight) + ',' +
               fmt6(r->avg_i) + ',' + fmt6(r->avg_w) + ',' + fmt6(r->sqnr_db) + ',' +
               fmt6(r->throughput) + ',' + fmt6(r->efficiency) + ',' +
               (r->pareto ? '1' : '0') + '\n';
    }
    return out;
}

} // namespace fp8cim
