// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

namespace fp8cim {

// One measured macro operating point. avg_i/avg_w include the sign bit.
struct MeasuredRow {
    double avg_i;
    double avg_w;
    double throughput;    // TFLOPS
    double efficiency;    // TFLOPS/W
};

// Silicon reference set the model is fitted against: two fixed-bitwidth FP
// rows pin the throughput constant and the affine energy line, one dynamic
// row pins the predictor overhead, a second dynamic row is held out to
// report the fit residual. INT rows are carried as-is.
struct MacroMeasurements {
    MeasuredRow fixed_low;        // narrow fixed config
    MeasuredRow fixed_high;       // wide fixed config
    MeasuredRow dynamic_fit;
    MeasuredRow dynamic_holdout;
    MeasuredRow int4;
    MeasuredRow int8;
    std::string conditions;
    static MacroMeasurements reference();
};

// Fitted model: throughput = t_const / (I*W); 1/efficiency affine in I*W
// with a constant adder for the dynamic predictor.
struct PerfCalibration {
    double t_const = 0;           // TFLOPS * bit^2
    double e_a = 0;               // W/TFLOPS per I*W unit
    double e_b = 0;               // W/TFLOPS offset
    double e_mpu = 0;             // dynamic-mode W/TFLOPS adder
    MeasuredRow int4{};
    MeasuredRow int8{};
    double holdout_residual = 0;  // relative efficiency error on the holdout
    std::string conditions;
};

// Throws if the two fixed rows disagree on t_const by more than 1%.
PerfCalibration calibrate(const MacroMeasurements& m = MacroMeasurements::reference());

enum class PerfMode { fixed_fp, dynamic_fp, int_mode };

struct PerfReport {
    PerfMode mode;
    double avg_i;
    double avg_w;
    double throughput;
    double efficiency;
};

// avg bitwidths include the sign bit. int_mode accepts only the 4/4 and 8/8
// table points.
PerfReport estimate(double avg_i, double avg_w, PerfMode mode, const PerfCalibration& cal);

// Plain "key = value" text round-trip.
void save_calibration(const PerfCalibration& cal, const std::string& path);
PerfCalibration load_calibration(const std::string& path);

} // namespace fp8cim
