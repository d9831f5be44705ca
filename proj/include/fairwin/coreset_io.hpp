#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "fairwin/coreset.hpp"

namespace fairwin {

// Binary coreset container, little-endian throughout:
//   "FWCS" | u16 version | u16 dim | u64 count | count records
// record: i64 timestamp, i64 coord * dim, f64 weight, f64 prob,
//         u64 group mask, i64 ring center, i32 ring index.
inline constexpr std::uint16_t kCoresetFormatVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));  // host is little-endian
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    unsigned char buf[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(T)))
        throw std::runtime_error("coreset io: truncated stream");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace detail

inline void write_records(std::ostream& os, int dim,
                          const std::vector<CoresetRecord>& records) {
    os.write("FWCS", 4);
    detail::put_le<std::uint16_t>(os, kCoresetFormatVersion);
    detail::put_le<std::uint16_t>(os, static_cast<std::uint16_t>(dim));
    detail::put_le<std::uint64_t>(os, records.size());
    for (const auto& r : records) {
        if (r.point.location.coords.size() != static_cast<std::size_t>(dim))
            throw std::invalid_argument("coreset io: record dimension mismatch");
        detail::put_le<std::int64_t>(os, r.point.timestamp);
        for (std::int64_t c : r.point.location.coords) detail::put_le<std::int64_t>(os, c);
        detail::put_le<double>(os, r.point.weight);
        detail::put_le<double>(os, r.prob);
        detail::put_le<std::uint64_t>(os, r.point.groups);
        detail::put_le<std::int64_t>(os, static_cast<std::int64_t>(r.ring_center));
        detail::put_le<std::int32_t>(os, r.ring);
    }
    if (!os) throw std::runtime_error("coreset io: write failed");
}

struct CoresetFile {
    int dim = 0;
    std::vector<CoresetRecord> records;
};

inline CoresetFile read_records(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "FWCS", 4) != 0)
        throw std::runtime_error("coreset io: bad magic");
    const auto version = detail::get_le<std::uint16_t>(is);
    if (version != kCoresetFormatVersion)
        throw std::runtime_error("coreset io: unsupported version " + std::to_string(version));
    const int dim = detail::get_le<std::uint16_t>(is);
    const auto count = detail::get_le<std::uint64_t>(is);
    CoresetFile out;
    out.dim = dim;
    out.records.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        CoresetRecord r;
        r.point.timestamp = detail::get_le<std::int64_t>(is);
        r.point.location.coords.resize(dim);
        for (int c = 0; c < dim; ++c)
            r.point.location.coords[c] = detail::get_le<std::int64_t>(is);
        r.point.weight = detail::get_le<double>(is);
        r.prob = detail::get_le<double>(is);
        r.point.groups = detail::get_le<std::uint64_t>(is);
        r.ring_center = static_cast<std::size_t>(detail::get_le<std::int64_t>(is));
        r.ring = detail::get_le<std::int32_t>(is);
        out.records.push_back(std::move(r));
    }
    return out;
}

inline void save_records(const std::string& path, int dim,
                         const std::vector<CoresetRecord>& records) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("coreset io: cannot open " + path);
    write_records(os, dim, records);
}

inline CoresetFile load_records(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("coreset io: cannot open " + path);
    return read_records(is);
}

// CSV mirror of the binary format, one record per row.  Doubles are printed
// with max_digits10 so a round trip is value-exact.
inline void write_records_csv(std::ostream& os, int dim,
                              const std::vector<CoresetRecord>& records) {
    os << "timestamp";
    for (int c = 0; c < dim; ++c) os << ",x" << c;
    os << ",weight,prob,group_mask,ring_center,ring\n";
    char buf[64];
    for (const auto& r : records) {
        if (r.point.location.coords.size() != static_cast<std::size_t>(dim))
            throw std::invalid_argument("coreset io: record dimension mismatch");
        os << r.point.timestamp;
        for (std::int64_t c : r.point.location.coords) os << ',' << c;
        std::snprintf(buf, sizeof(buf), "%.17g", r.point.weight);
        os << ',' << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", r.prob);
        os << ',' << buf;
        os << ',' << r.point.groups << ',' << r.ring_center << ',' << r.ring << '\n';
    }
    if (!os) throw std::runtime_error("coreset io: write failed");
}

inline CoresetFile read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("coreset io: empty csv");
    std::size_t cols = 1;
    for (char ch : line)
        if (ch == ',') ++cols;
    if (cols < 7) throw std::runtime_error("coreset io: bad csv header");
    const int dim = static_cast<int>(cols) - 6;
    CoresetFile out;
    out.dim = dim;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        auto next = [&]() {
            if (!std::getline(row, field, ','))
                throw std::runtime_error("coreset io: short csv row");
            return field;
        };
        CoresetRecord r;
        r.point.timestamp = std::stoll(next());
        r.point.location.coords.resize(dim);
        for (int c = 0; c < dim; ++c) r.point.location.coords[c] = std::stoll(next());
        r.point.weight = std::stod(next());
        r.prob = std::stod(next());
        r.point.groups = std::stoull(next());
        r.ring_center = std::stoull(next());
        r.ring = std::stoi(next());
        out.records.push_back(std::move(r));
    }
    return out;
}

} // namespace fairwin
