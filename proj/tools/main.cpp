// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fp8cim/dsbp.hpp"
#include "fp8cim/fiau.hpp"
#include "fp8cim/fp8.hpp"
#include "fp8cim/mac_array.hpp"
#include "fp8cim/perf.hpp"
#include "fp8cim/sweep.hpp"
#include "fp8cim/synthetic.hpp"
#include "fp8cim/tensor_io.hpp"

namespace {

using namespace fp8cim;

Fp8Format format_from(const std::string& name) {
    auto f = Fp8Format::parse(name);
    if (!f)
        throw std::runtime_error("unknown format '" + name + "' (expected E2M5..E5M2)");
    return *f;
}

SynthDist dist_from(const std::string& name) {
    auto d = parse_dist(name);
    if (!d)
        throw std::runtime_error(
            "unknown distribution '" + name +
            "' (expected uniform-exponent, concentrated or outlier-heavy)");
    return *d;
}

int quarters_from(double k) {
    double q = k * 4.0;
    if (k < 0 || q != std::floor(q))
        throw std::runtime_error("k must be a nonnegative multiple of 0.25");
    return static_cast<int>(q);
}

struct PresetPoint {
    PipelineMode mode;
    int k_quarters;
    int b_fix_input;
    int b_fix_weight;
};

PresetPoint preset_from(const std::string& name) {
    if (name == "precise")
        return {PipelineMode::dynamic, 4, 6, 5};
    if (name == "efficient")
        return {PipelineMode::dynamic, 8, 4, 4};
    if (name == "e5m7-fixed")
        return {PipelineMode::fixed, 0, 7, 7};
    if (name == "e5m3-fixed")
        return {PipelineMode::fixed, 0, 3, 3};
    throw std::runtime_error("unknown preset '" + name +
                             "' (expected precise, efficient, e5m7-fixed or e5m3-fixed)");
}

PipelineMode mode_from(const std::string& name) {
    if (name == "fixed")
        return PipelineMode::fixed;
    if (name == "dynamic")
        return PipelineMode::dynamic;
    throw std::runtime_error("unknown mode '" + name + "' (expected fixed or dynamic)");
}

PerfCalibration calibration_from(const std::string& path) {
    return path.empty() ? calibrate() : load_calibration(path);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os || !(os << text).flush())
        throw std::runtime_error("cannot write " + path);
}

int run_gen(const std::string& dist, const std::string& format, uint64_t count, uint64_t seed,
            const std::string& out) {
    Fp8Tensor t = gen_synthetic(dist_from(dist), format_from(format), count, seed);
    save_f8t(t, out);
    std::cout << "wrote " << out << ": " << t.size() << " " << t.format.name()
              << " elements, dist " << dist << ", seed " << seed << "\n";
    return 0;
}

int run_sweep_cmd(std::string inputs, std::string weights, const std::string& preset,
                  const std::string& mode, std::vector<double> ks, std::vector<int> bfi,
                  std::vector<int> bfw, uint64_t gen_count, const std::string& format,
                  uint64_t seed, const std::string& cal_path, const std::string& out) {
    SweepSpec spec;
    spec.seed = seed;
    if (!preset.empty()) {
        if (!mode.empty() || !ks.empty() || !bfi.empty() || !bfw.empty())
            throw std::runtime_error("--preset excludes --mode/--k/--b-fix-input/--b-fix-weight");
        PresetPoint p = preset_from(preset);
        spec.mode = p.mode;
        spec.k_quarters = {p.k_quarters};
        spec.b_fix_input = {p.b_fix_input};
        spec.b_fix_weight = {p.b_fix_weight};
    } else {
        if (mode.empty())
            throw std::runtime_error("need --mode (or --preset)");
        spec.mode = mode_from(mode);
        if (ks.empty()) {
            if (spec.mode == PipelineMode::dynamic)
                throw std::runtime_error("dynamic mode needs --k");
            ks = {0.0};
        }
        for (double k : ks)
            spec.k_quarters.push_back(quarters_from(k));
        if (bfi.empty() || bfw.empty())
            throw std::runtime_error("need --b-fix-input and --b-fix-weight");
        spec.b_fix_input = bfi;
        spec.b_fix_weight = bfw;
    }

    if (inputs.empty() != weights.empty())
        throw std::runtime_error("--inputs and --weights go together");
    Fp8Tensor x = inputs.empty()
                      ? gen_synthetic(SynthDist::outlier_heavy, format_from(format), gen_count,
                                      spec.seed)
                      : load_f8t(inputs);
    Fp8Tensor w = weights.empty()
                      ? gen_synthetic(SynthDist::outlier_heavy, format_from(format), gen_count,
                                      spec.seed + 1)
                      : load_f8t(weights);

    std::vector<SweepRow> rows = run_sweep(x, w, spec, calibration_from(cal_path));
    write_text(out, to_csv(rows));
    if (!out.empty())
        std::cout << "wrote " << out << ": " << rows.size() << " configurations\n";
    return 0;
}

int run_mac(const std::string& inputs, const std::string& weights, uint64_t group_idx,
            const std::string& preset, const std::string& mode, double k, int b_fix_input,
            int b_fix_weight, int trace_element) {
    PresetPoint p{};
    if (!preset.empty()) {
        p = preset_from(preset);
    } else {
        if (mode.empty())
            throw std::runtime_error("need --mode (or --preset)");
        p.mode = mode_from(mode);
        p.k_quarters = quarters_from(k);
        p.b_fix_input = b_fix_input;
        p.b_fix_weight = b_fix_weight;
    }

    Fp8Tensor x = load_f8t(inputs);
    Fp8Tensor w = load_f8t(weights);
    if (x.dims != w.dims)
        throw std::runtime_error("input/weight shapes differ");
    std::vector<Group> gx = partition(x);
    std::vector<Group> gw = partition(w);
    if (group_idx >= gx.size())
        throw std::runtime_error("group index " + std::to_string(group_idx) + " out of range (" +
                                 std::to_string(gx.size()) + " groups)");
    const Group& X = gx[group_idx];
    const Group& W = gw[group_idx];

    DsbpConfig icfg{64, p.k_quarters, p.b_fix_input, OperandKind::input};
    DsbpConfig wcfg{64, p.k_quarters, p.b_fix_weight, OperandKind::weight};
    MacroMacResult r = fp_macro_mac(X, W, icfg, wcfg, p.mode);

    double exact = 0;
    for (size_t i = 0; i < X.valid; ++i)
        exact += to_real(X.elems[i], x.format) * to_real(W.elems[i], w.format);

    std::cout << "group " << group_idx << ": " << X.valid << " elements, " << x.format.name()
              << " inputs x " << w.format.name() << " weights\n"
              << "mode " << (r.dynamic ? "dynamic" : "fixed") << ", k " << p.k_quarters / 4.0
              << ", b_fix " << p.b_fix_input << "/" << p.b_fix_weight << "\n"
              << "weights: e_max " << r.weight_alignment.e_max << ", b_dyn "
              << r.weight_alignment.b_dyn << ", b_g " << r.b_g_weight << " (width "
              << r.b_g_weight + 1 << ")\n"
              << "inputs:  e_max " << r.input_alignment.e_max << ", b_g " << r.b_g_input
              << " (width " << r.b_g_input + 1 << ")\n"
              << "acc " << r.acc << ", scale_exp " << r.scale_exp << ", value " << r.value << "\n"
              << "exact dot " << exact << ", abs err " << std::fabs(r.value - exact) << "\n";
    if (r.dynamic) {
        std::cout << "mpu trace:\n";
        r.mpu.dump(std::cout);
    }
    if (trace_element >= 0) {
        if (static_cast<size_t>(trace_element) >= X.valid)
            throw std::runtime_error("trace element out of range");
        const Decoded& d = X.elems[trace_element];
        ShiftProfile sp = shift_profile(X);
        int off = sp.e_max - d.e_raw;
        std::vector<FiauCycle> cyc;
        int32_t got = fiau_align_stepped(d.sign * d.align_sig(), x.format.mant_bits + 2, off,
                                         r.b_g_input + 1, &cyc);
        std::cout << "element " << trace_element << ": sign " << d.sign << ", e_raw " << d.e_raw
                  << ", mantissa " << d.sign * d.align_sig() << ", exp_offset " << off << "\n"
                  << "fiau cycles (save_len " << r.b_g_input + 1 << "):\n";
        for (const FiauCycle& c : cyc)
            std::cout << "  cycle " << c.cycle << ": r_ptr " << c.r_ptr << " -> bit " << c.bit
                      << "\n";
        std::cout << "fiau aligned " << got << " (pipeline "
                  << r.input_alignment.aligned[trace_element] << ")\n";
    }
    return 0;
}

int run_calibrate(const std::string& out) {
    PerfCalibration cal = calibrate();
    if (!out.empty()) {
        save_calibration(cal, out);
        std::cout << "wrote " << out << "\n";
    }
    char buf[256];
    snprintf(buf, sizeof buf,
             "t_const %.6g TFLOPS*bit^2\ne_a %.6g  e_b %.6g  e_mpu %.6g (W/TFLOPS)\n",
             cal.t_const, cal.e_a, cal.e_b, cal.e_mpu);
    std::cout << buf;
    MacroMeasurements m = MacroMeasurements::reference();
    double iw = m.dynamic_holdout.avg_i * m.dynamic_holdout.avg_w;
    double pred = 1.0 / (cal.e_a * iw + cal.e_b + cal.e_mpu);
    snprintf(buf, sizeof buf,
             "holdout efficiency: predicted %.4g vs measured %.4g TFLOPS/W (residual %+.1f%%)\n",
             pred, m.dynamic_holdout.efficiency, 100.0 * cal.holdout_residual);
    std::cout << buf;
    snprintf(buf, sizeof buf, "int4 %.3g TOPS %.4g TOPS/W, int8 %.3g TOPS %.4g TOPS/W\n",
             cal.int4.throughput, cal.int4.efficiency, cal.int8.throughput, cal.int8.efficiency);
    std::cout << buf << "conditions: " << cal.conditions << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"FP8 variable-aligned-mantissa compute-in-memory explorer"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");

    auto* gen = app.add_subcommand("gen", "generate a synthetic FP8 tensor");
    std::string g_dist;
    std::string g_format = "E4M3";
    uint64_t g_count = 4096;
    uint64_t g_seed = 0;
    std::string g_out;
    gen->set_help_flag("--help", "print help");
    gen->add_option("--dist", g_dist, "uniform-exponent | concentrated | outlier-heavy")
        ->required();
    gen->add_option("--format", g_format, "E2M5 | E3M4 | E4M3 | E5M2");
    gen->add_option("--count", g_count, "element count");
    gen->add_option("--seed", g_seed, "generator seed");
    gen->add_option("--out", g_out, "output .f8t path")->required();

    auto* sweep = app.add_subcommand("sweep", "sweep (k, b_fix) configurations, emit CSV");
    std::string s_inputs, s_weights, s_preset, s_mode, s_cal, s_out;
    std::vector<double> s_k;
    std::vector<int> s_bfi, s_bfw;
    uint64_t s_gen_count = 8192;
    std::string s_format = "E4M3";
    uint64_t s_seed = 0;
    sweep->set_help_flag("--help", "print help");
    sweep->add_option("--inputs", s_inputs, "input tensor (.f8t)");
    sweep->add_option("--weights", s_weights, "weight tensor (.f8t)");
    sweep->add_option("--preset", s_preset, "precise | efficient | e5m7-fixed | e5m3-fixed");
    sweep->add_option("--mode", s_mode, "fixed | dynamic");
    sweep->add_option("--k", s_k, "k values (multiples of 0.25)")->delimiter(',');
    sweep->add_option("--b-fix-input", s_bfi, "input b_fix values")->delimiter(',');
    sweep->add_option("--b-fix-weight", s_bfw, "weight b_fix values")->delimiter(',');
    sweep->add_option("--gen-count", s_gen_count, "elements when self-generating tensors");
    sweep->add_option("--format", s_format, "format when self-generating tensors");
    sweep->add_option("--seed", s_seed, "seed when self-generating tensors");
    sweep->add_option("--cal", s_cal, "calibration file (default: built-in reference)");
    sweep->add_option("--out", s_out, "CSV path (default: stdout)");

    auto* mac = app.add_subcommand("mac", "run one group through the full pipeline");
    std::string m_inputs, m_weights, m_preset, m_mode;
    uint64_t m_group = 0;
    double m_k = 0;
    int m_bfi = 0, m_bfw = 0, m_trace = -1;
    mac->set_help_flag("--help", "print help");
    mac->add_option("--inputs", m_inputs, "input tensor (.f8t)")->required();
    mac->add_option("--weights", m_weights, "weight tensor (.f8t)")->required();
    mac->add_option("--group", m_group, "group index");
    mac->add_option("--preset", m_preset, "precise | efficient | e5m7-fixed | e5m3-fixed");
    mac->add_option("--mode", m_mode, "fixed | dynamic");
    mac->add_option("--k", m_k, "k (multiple of 0.25)");
    mac->add_option("--b-fix-input", m_bfi, "input b_fix");
    mac->add_option("--b-fix-weight", m_bfw, "weight b_fix");
    mac->add_option("--trace-element", m_trace, "dump the serial alignment of one element");

    auto* calib = app.add_subcommand("calibrate", "fit and print the performance model");
    std::string c_out;
    calib->set_help_flag("--help", "print help");
    calib->add_option("--out", c_out, "write the calibration file here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return run_gen(g_dist, g_format, g_count, g_seed, g_out);
        if (sweep->parsed())
            return run_sweep_cmd(s_inputs, s_weights, s_preset, s_mode, s_k, s_bfi, s_bfw,
                                 s_gen_count, s_format, s_seed, s_cal, s_out);
        if (mac->parsed())
            return run_mac(m_inputs, m_weights, m_group, m_preset, m_mode, m_k, m_bfi, m_bfw,
                           m_trace);
        if (calib->parsed())
            return run_calibrate(c_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
