// Copyright 2026 The qrobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include "qrobust/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

namespace qrobust::io {

/// Whole-file read; gzip streams are inflated transparently.
inline std::vector<std::uint8_t> read_file_bytes(const std::string &path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (f == nullptr) {
        throw IoError("cannot open '" + path + "'");
    }
    std::vector<std::uint8_t> out;
    std::uint8_t buf[1 << 16];
    int n = 0;
    while ((n = gzread(f, buf, sizeof buf)) > 0) {
        out.insert(out.end(), buf, buf + n);
    }
    int errnum = 0;
    const char *msg = gzerror(f, &errnum);
    gzclose(f);
    if (n < 0 || errnum != Z_OK) {
        throw FormatError("corrupt stream in '" + path + "': " + (msg ? msg : "?"));
    }
    return out;
}

inline bool ends_with(const std::string &s, const std::string &suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Writes bytes; paths ending in ".gz" are gzip-compressed.
inline void write_file_bytes(const std::string &path, std::span<const std::uint8_t> bytes) {
    if (ends_with(path, ".gz")) {
        gzFile f = gzopen(path.c_str(), "wb9");
        if (f == nullptr) {
            throw IoError("cannot create '" + path + "'");
        }
        const int written = gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
        gzclose(f);
        if (written != static_cast<int>(bytes.size())) {
            throw IoError("short write to '" + path + "'");
        }
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create '" + path + "'");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("short write to '" + path + "'");
    }
}

inline void put_u32_be(std::vector<std::uint8_t> &out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> s));
    }
}

inline std::uint32_t get_u32_be(std::span<const std::uint8_t> in, std::size_t off) {
    return (std::uint32_t{in[off]} << 24) | (std::uint32_t{in[off + 1]} << 16) |
           (std::uint32_t{in[off + 2]} << 8) | std::uint32_t{in[off + 3]};
}

inline void put_u64_le(std::vector<std::uint8_t> &out, std::uint64_t v) {
    for (int s = 0; s < 64; s += 8) {
        out.push_back(static_cast<std::uint8_t>(v >> s));
    }
}

inline std::uint64_t get_u64_le(std::span<const std::uint8_t> in, std::size_t off) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) {
        v = (v << 8) | in[off + static_cast<std::size_t>(b)];
    }
    return v;
}

inline void put_f64_le(std::vector<std::uint8_t> &out, double v) {
    put_u64_le(out, std::bit_cast<std::uint64_t>(v));
}

inline double get_f64_le(std::span<const std::uint8_t> in, std::size_t off) {
    return std::bit_cast<double>(get_u64_le(in, off));
}

} // namespace qrobust::io
