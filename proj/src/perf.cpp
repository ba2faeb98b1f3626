// SPDX-License-Identifier: Apache-2.0
#include "fp8cim/perf.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fp8cim {

MacroMeasurements MacroMeasurements::reference() {
    MacroMeasurements m;
    m.fixed_low = {4.0, 4.0, 0.192, 77.9};
    m.fixed_high = {8.0, 8.0, 0.048, 20.4};
    m.dynamic_fit = {7.65, 6.61, 0.061, 22.5};
    m.dynamic_holdout = {5.58, 6.08, 0.092, 33.7};
    m.int4 = {4.0, 4.0, 0.192, 109.3};
    m.int8 = {8.0, 8.0, 0.048, 27.3};
    m.conditions = "50% weight sparsity, 50% input toggle rate";
    return m;
}

PerfCalibration calibrate(const MacroMeasurements& m) {
    double iw_lo = m.fixed_low.avg_i * m.fixed_low.avg_w;
    double iw_hi = m.fixed_high.avg_i * m.fixed_high.avg_w;
    if (iw_lo == iw_hi)
        throw std::invalid_argument("calibrate: fixed rows share the same I*W");
    double t_lo = m.fixed_low.throughput * iw_lo;
    double t_hi = m.fixed_high.throughput * iw_hi;
    if (std::fabs(t_lo - t_hi) > 0.01 * std::min(t_lo, t_hi))
        throw std::invalid_argument("calibrate: fixed rows disagree on the throughput constant");

    PerfCalibration cal;
    cal.t_const = 0.5 * (t_lo + t_hi);
    cal.e_a = (1.0 / m.fixed_high.efficiency - 1.0 / m.fixed_low.efficiency) / (iw_hi - iw_lo);
    cal.e_b = 1.0 / m.fixed_low.efficiency - cal.e_a * iw_lo;
    double iw_dyn = m.dynamic_fit.avg_i * m.dynamic_fit.avg_w;
    cal.e_mpu = 1.0 / m.dynamic_fit.efficiency - (cal.e_a * iw_dyn + cal.e_b);
    cal.int4 = m.int4;
    cal.int8 = m.int8;
    cal.conditions = m.conditions;

    double iw_ho = m.dynamic_holdout.avg_i * m.dynamic_holdout.avg_w;
    double eff_ho = 1.0 / (cal.e_a * iw_ho + cal.e_b + cal.e_mpu);
    cal.holdout_residual = (eff_ho - m.dynamic_holdout.efficiency) / m.dynamic_holdout.efficiency;
    return cal;
}

PerfReport estimate(double avg_i, double avg_w, PerfMode mode, const PerfCalibration& cal) {
    if (avg_i <= 0 || avg_w <= 0)
        throw std::invalid_argument("estimate: bitwidths must be positive");
    PerfReport r;
    r.mode = mode;
    r.avg_i = avg_i;
    r.avg_w = avg_w;
    if (mode == PerfMode::int_mode) {
        const MeasuredRow* row = nullptr;
        if (avg_i == 4 && avg_w == 4)
            row = &cal.int4;
        else if (avg_i == 8 && avg_w == 8)
            row = &cal.int8;
        else
            throw std::invalid_argument("estimate: int mode supports only 4/4 and 8/8");
        r.throughput = row->throughput;
        r.efficiency = row->efficiency;
        return r;
    }
    double iw = avg_i * avg_w;
    r.throughput = cal.t_const / iw;
    double inv = cal.e_a * iw + cal.e_b;
    if (mode == PerfMode::dynamic_fp)
        inv += cal.e_mpu;
    r.efficiency = 1.0 / inv;
    return r;
}

void save_calibration(const PerfCalibration& cal, const std::string& path) {
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path + " for writing");
    os.precision(17);
    os << "t_const = " << cal.t_const << "\n"
       << "e_a = " << cal.e_a << "\n"
       << "e_b = " << cal.e_b << "\n"
       << "e_mpu = " << cal.e_mpu << "\n"
       << "int4_throughput = " << cal.int4.throughput << "\n"
       << "int4_efficiency = " << cal.int4.efficiency << "\n"
       << "int8_throughput = " << cal.int8.throughput << "\n"
       << "int8_efficiency = " << cal.int8.efficiency << "\n"
       << "holdout_residual = " << cal.holdout_residual << "\n"
       << "conditions = " << cal.conditions << "\n";
    if (!os.flush())
        throw std::runtime_error("failed writing " + path);
}

PerfCalibration load_calibration(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t h = line.find('#');
        if (h != std::string::npos)
            line.erase(h);
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        if (trim(line).empty())
            continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto num = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error(path + ": missing key '" + key + "'");
        size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(it->second, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != it->second.size())
            throw std::runtime_error(path + ": bad number for '" + key + "'");
        return v;
    };
    PerfCalibration cal;
    cal.t_const = num("t_const");
    cal.e_a = num("e_a");
    cal.e_b = num("e_b");
    cal.e_mpu = num("e_mpu");
    cal.int4 = {4.0, 4.0, num("int4_throughput"), num("int4_efficiency")};
    cal.int8 = {8.0, 8.0, num("int8_throughput"), num("int8_efficiency")};
    cal.holdout_residual = num("holdout_residual");
    if (auto it = kv.find("conditions"); it != kv.end())
        cal.conditions = it->second;
    return cal;
}

} // namespace fp8cim
