// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "fp8cim/fp8.hpp"

namespace fp8cim {

enum class IoErrorCode {
    io_failure,     // cannot open/read/write
    bad_magic,
    bad_header,     // format code, rank or dims out of range
    truncated,      // payload shorter than the header promises
    trailing_data,  // payload longer than the header promises
    empty_tensor,
    non_finite,     // Inf/NaN encoding or value
    parse_error,    // unparseable CSV field
};

struct IoError : std::runtime_error {
    IoErrorCode code;
    IoError(IoErrorCode c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

// F8T container: "F8T1" magic, one format byte (exponent width), u32 rank,
// u32 dims (little endian), then the row-major element bytes.
void save_f8t(const Fp8Tensor& t, const std::string& path);
Fp8Tensor load_f8t(const std::string& path);

struct ImportStats {
    size_t count = 0;
    size_t saturated = 0;   // |value| above the format's max finite
};

// Raw little-endian float32 stream; becomes a rank-1 tensor.
Fp8Tensor import_real_f32(const std::string& path, const Fp8Format& fmt,
                          ImportStats* stats = nullptr);
// Comma/whitespace-separated decimal values; becomes a rank-1 tensor.
Fp8Tensor import_real_csv(const std::string& path, const Fp8Format& fmt,
                          ImportStats* stats = nullptr);

} // namespace fp8cim
