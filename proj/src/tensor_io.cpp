// SPDX-License-Identifier: Apache-2.0
#include "fp8cim/tensor_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace fp8cim {

namespace {

constexpr char kMagic[4] = {'F', '8', 'T', '1'};
constexpr uint32_t kMaxRank = 8;

std::vector<uint8_t> read_all(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError(IoErrorCode::io_failure, "cannot open " + path);
    std::vector<uint8_t> buf((std::istreambuf_iterator<char>(is)),
                             std::istreambuf_iterator<char>());
    if (is.bad())
        throw IoError(IoErrorCode::io_failure, "read failed on " + path);
    return buf;
}

void put_u32(std::ostream& os, uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                 static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    os.write(b, 4);
}

uint32_t get_u32(const std::vector<uint8_t>& buf, size_t at) {
    return uint32_t{buf[at]} | uint32_t{buf[at + 1]} << 8 | uint32_t{buf[at + 2]} << 16 |
           uint32_t{buf[at + 3]} << 24;
}

} // namespace

void save_f8t(const Fp8Tensor& t, const std::string& path) {
    if (t.size() == 0)
        throw IoError(IoErrorCode::empty_tensor, "refusing to save an empty tensor");
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError(IoErrorCode::io_failure, "cannot open " + path + " for writing");
    os.write(kMagic, 4);
    os.put(static_cast<char>(t.format.exp_bits));
    put_u32(os, static_cast<uint32_t>(t.dims.size()));
    for (uint32_t d : t.dims)
        put_u32(os, d);
    os.write(reinterpret_cast<const char*>(t.bytes.data()),
             static_cast<std::streamsize>(t.bytes.size()));
    if (!os.flush())
        throw IoError(IoErrorCode::io_failure, "write failed on " + path);
}

Fp8Tensor load_f8t(const std::string& path) {
    std::vector<uint8_t> buf = read_all(path);
    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw IoError(IoErrorCode::bad_magic, path + ": not an F8T file");
    if (buf.size() < 9)
        throw IoError(IoErrorCode::truncated, path + ": header cut short");
    int exp_bits = buf[4];
    if (exp_bits < 2 || exp_bits > 5)
        throw IoError(IoErrorCode::bad_header,
                      path + ": unknown format code " + std::to_string(exp_bits));
    Fp8Format fmt = Fp8Format::from_exp_bits(exp_bits);
    uint32_t rank = get_u32(buf, 5);
    if (rank == 0 || rank > kMaxRank)
        throw IoError(IoErrorCode::bad_header, path + ": rank " + std::to_string(rank) +
                                                   " out of range [1," +
                                                   std::to_string(kMaxRank) + "]");
    size_t off = 9;
    if (buf.size() < off + 4ull * rank)
        throw IoError(IoErrorCode::truncated, path + ": dims cut short");
    std::vector<uint32_t> dims(rank);
    uint64_t n = 1;
    for (uint32_t i = 0; i < rank; ++i) {
        dims[i] = get_u32(buf, off + 4ull * i);
        if (dims[i] == 0)
            throw IoError(IoErrorCode::bad_header, path + ": zero-sized dim");
        n *= dims[i];
        if (n > (uint64_t{1} << 32))
            throw IoError(IoErrorCode::bad_header, path + ": tensor too large");
    }
    off += 4ull * rank;
    if (buf.size() < off + n)
        throw IoError(IoErrorCode::truncated,
                      path + ": payload has " + std::to_string(buf.size() - off) +
                          " bytes, header promises " + std::to_string(n));
    if (buf.size() > off + n)
        throw IoError(IoErrorCode::trailing_data, path + ": trailing bytes after payload");
    std::vector<uint8_t> bytes(buf.begin() + static_cast<ptrdiff_t>(off), buf.end());
    for (size_t i = 0; i < bytes.size(); ++i)
        if (!fmt.finite_encoding(bytes[i]))
            throw IoError(IoErrorCode::non_finite,
                          path + ": non-finite " + fmt.name() + " encoding at element " +
                              std::to_string(i));
    return Fp8Tensor::from_bytes(fmt, std::move(dims), std::move(bytes));
}

namespace {

Fp8Tensor encode_reals(const std::vector<double>& vals, const Fp8Format& fmt,
                       ImportStats* stats, const std::string& path) {
    if (vals.empty())
        throw IoError(IoErrorCode::empty_tensor, path + ": no values to import");
    ImportStats local;
    ImportStats& st = stats ? *stats : local;
    st = ImportStats{};
    double max = fmt.max_finite();
    std::vector<uint8_t> bytes;
    bytes.reserve(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) {
        if (!std::isfinite(vals[i]))
            throw IoError(IoErrorCode::non_finite,
                          path + ": non-finite value at element " + std::to_string(i));
        if (std::fabs(vals[i]) > max)
            ++st.saturated;
        bytes.push_back(encode(vals[i], fmt));
    }
    st.count = vals.size();
    return Fp8Tensor::from_bytes(fmt, {static_cast<uint32_t>(vals.size())}, std::move(bytes));
}

} // namespace

Fp8Tensor import_real_f32(const std::string& path, const Fp8Format& fmt, ImportStats* stats) {
    std::vector<uint8_t> buf = read_all(path);
    if (buf.empty())
        throw IoError(IoErrorCode::empty_tensor, path + ": empty file");
    if (buf.size() % 4 != 0)
        throw IoError(IoErrorCode::truncated, path + ": size is not a multiple of 4");
    std::vector<double> vals(buf.size() / 4);
    for (size_t i = 0; i < vals.size(); ++i) {
        uint32_t u = get_u32(buf, 4 * i);
        float f;
        std::memcpy(&f, &u, 4);
        vals[i] = f;
    }
    return encode_reals(vals, fmt, stats, path);
}

Fp8Tensor import_real_csv(const std::string& path, const Fp8Format& fmt, ImportStats* stats) {
    std::ifstream is(path);
    if (!is)
        throw IoError(IoErrorCode::io_failure, "cannot open " + path);
    std::vector<double> vals;
    std::string tok;
    auto flush_tok = [&]() {
        if (tok.empty())
            return;
        size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size())
            throw IoError(IoErrorCode::parse_error,
                          path + ": cannot parse '" + tok + "' at element " +
                              std::to_string(vals.size()));
        vals.push_back(v);
        tok.clear();
    };
    char c;
    while (is.get(c)) {
        if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t')
            flush_tok();
        else
            tok.push_back(c);
    }
    flush_tok();
    return encode_reals(vals, fmt, stats, path);
}

} // namespace fp8cim
