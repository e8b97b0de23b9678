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
/**
 * @file
 * Model checkpoints: a plain-text header terminated by a line "end",
 * followed by the parameter block as little-endian IEEE-754 doubles.
 *
 *   qrobust-checkpoint 1
 *   family qvc | classical
 *   ... family-specific "key value..." lines ...
 *   seed <u64>
 *   param_count <n>
 *   end
 *   <n x f64>
 *
 * qvc keys: num_qubits, num_layers, num_classes, temperature (%.17g).
 * classical keys: input <w> <h>, conv <c1> <c2>..., dense <d1>...,
 * num_classes.
 */
#pragma once

#include "qrobust/binary_io.hpp"
#include "qrobust/classical.hpp"
#include "qrobust/error.hpp"
#include "qrobust/qvc.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace qrobust {

using AnyModel = std::variant<QvcModel, ClassicalModel>;

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::uint8_t> with_params(const std::string &header,
                                             std::span<const double> params) {
    std::vector<std::uint8_t> out(header.begin(), header.end());
    for (double v : params) {
        io::put_f64_le(out, v);
    }
    return out;
}

inline std::vector<std::size_t> parse_sizes(std::istringstream &line) {
    std::vector<std::size_t> v;
    std::size_t x = 0;
    while (line >> x) {
        v.push_back(x);
    }
    return v;
}

} // namespace detail

inline std::vector<std::uint8_t> serialize_checkpoint(const QvcModel &m) {
    std::ostringstream h;
    h << "qrobust-checkpoint 1\nfamily qvc\n"
      << "num_qubits " << m.num_qubits() << "\nnum_layers " << m.num_layers()
      << "\nnum_classes " << m.num_classes() << "\ntemperature "
      << detail::format_double(m.temperature()) << "\nseed " << m.seed()
      << "\nparam_count " << m.parameter_count() << "\nend\n";
    return detail::with_params(h.str(), m.parameters());
}

inline std::vector<std::uint8_t> serialize_checkpoint(const ClassicalModel &m) {
    const auto &s = m.spec();
    std::ostringstream h;
    h << "qrobust-checkpoint 1\nfamily classical\ninput " << s.width << ' ' << s.height
      << "\nconv";
    for (auto c : s.conv_channels) {
        h << ' ' << c;
    }
    h << "\ndense";
    for (auto d : s.dense_hidden) {
        h << ' ' << d;
    }
    h << "\nnum_classes " << s.num_classes << "\nseed " << m.seed() << "\nparam_count "
      << m.parameter_count() << "\nend\n";
    return detail::with_params(h.str(), m.parameters());
}

inline std::vector<std::uint8_t> serialize_checkpoint(const AnyModel &m) {
    return std::visit([](const auto &x) { return serialize_checkpoint(x); }, m);
}

inline AnyModel parse_checkpoint(std::span<const std::uint8_t> bytes,
                                 const std::string &origin = "<memory>") {
    std::map<std::string, std::string> fields;
    std::size_t pos = 0;
    bool terminated = false;
    std::size_t line_no = 0;
    while (pos < bytes.size()) {
        std::size_t eol = pos;
        while (eol < bytes.size() && bytes[eol] != '\n') {
            ++eol;
        }
        if (eol == bytes.size()) {
            break;
        }
        std::string line(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                         bytes.begin() + static_cast<std::ptrdiff_t>(eol));
        pos = eol + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != "qrobust-checkpoint 1") {
                throw FormatError(origin + ": not a version-1 qrobust checkpoint");
            }
            continue;
        }
        if (line == "end") {
            terminated = true;
            break;
        }
        const auto sp = line.find(' ');
        fields[line.substr(0, sp)] = sp == std::string::npos ? "" : line.substr(sp + 1);
    }
    if (!terminated) {
        throw FormatError(origin + ": checkpoint header not terminated");
    }
    auto need = [&](const std::string &key) -> std::istringstream {
        const auto it = fields.find(key);
        if (it == fields.end()) {
            throw FormatError(origin + ": checkpoint missing '" + key + "'");
        }
        return std::istringstream(it->second);
    };
    auto need_size = [&](const std::string &key) {
        auto s = need(key);
        std::size_t v = 0;
        if (!(s >> v)) {
            throw FormatError(origin + ": bad value for '" + key + "'");
        }
        return v;
    };
    const std::size_t count = need_size("param_count");
    std::uint64_t seed = 0;
    need("seed") >> seed;
    if (bytes.size() - pos != count * 8) {
        throw FormatError(origin + ": parameter block at offset " + std::to_string(pos) +
                          " has " + std::to_string(bytes.size() - pos) + " bytes, expected " +
                          std::to_string(count * 8));
    }
    std::vector<double> params(count);
    for (std::size_t i = 0; i < count; ++i) {
        params[i] = io::get_f64_le(bytes, pos + 8 * i);
    }
    try {
        std::string family;
        need("family") >> family;
        if (family == "qvc") {
            double temperature = 1.0;
            if (!(need("temperature") >> temperature)) {
                throw FormatError(origin + ": bad temperature");
            }
            return QvcModel::with_parameters(need_size("num_qubits"), need_size("num_layers"),
                                             need_size("num_classes"), std::move(params), seed,
                                             temperature);
        }
        if (family == "classical") {
            ClassicalSpec spec;
            auto in = need("input");
            if (!(in >> spec.width >> spec.height)) {
                throw FormatError(origin + ": bad input dimensions");
            }
            auto conv = need("conv");
            spec.conv_channels = detail::parse_sizes(conv);
            auto dense = need("dense");
            spec.dense_hidden = detail::parse_sizes(dense);
            spec.num_classes = need_size("num_classes");
            return ClassicalModel::with_parameters(std::move(spec), std::move(params), seed);
        }
        throw FormatError(origin + ": unknown model family '" + family + "'");
    } catch (const ConfigurationError &e) {
        throw FormatError(origin + ": inconsistent checkpoint: " + e.what());
    }
}

template <class M>
void save_checkpoint(const M &model, const std::string &path) {
    io::write_file_bytes(path, serialize_checkpoint(model));
}

inline AnyModel load_checkpoint(const std::string &path) {
    const auto bytes = io::read_file_bytes(path);
    return parse_checkpoint(bytes, path);
}

} // namespace qrobust
