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
 * Perturbation export as binary PGM triplets (original, delta, perturbed).
 */
#pragma once

#include "qrobust/attacks.hpp"
#include "qrobust/binary_io.hpp"
#include "qrobust/harness/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qrobust::harness {

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;
};

inline std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

inline void write_pgm(const std::filesystem::path &path, const GrayImage &img) {
    const std::string header = "P5\n" + std::to_string(img.width) + " " +
                               std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), img.pixels.begin(), img.pixels.end());
    io::write_file_bytes(path.string(), bytes);
}

inline GrayImage read_pgm(const std::filesystem::path &path) {
    const auto bytes = io::read_file_bytes(path.string());
    std::size_t pos = 0;
    auto token = [&]() {
        while (pos < bytes.size() && std::isspace(bytes[pos])) {
            ++pos;
        }
        std::string t;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) {
            t += static_cast<char>(bytes[pos++]);
        }
        return t;
    };
    GrayImage img;
    try {
        if (token() != "P5") {
            throw FormatError(path.string() + ": not a binary PGM");
        }
        img.width = std::stoul(token());
        img.height = std::stoul(token());
        if (token() != "255") {
            throw FormatError(path.string() + ": unsupported maxval");
        }
    } catch (const std::logic_error &) {
        throw FormatError(path.string() + ": malformed PGM header");
    }
    ++pos; // single whitespace after maxval
    if (bytes.size() - std::min(pos, bytes.size()) != img.width * img.height) {
        throw FormatError(path.string() + ": pixel block has the wrong size");
    }
    img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    return img;
}

/// Signed delta mapped symmetrically: 0 -> mid-gray, +-max|delta| -> white/black.
inline std::vector<double> delta_display(std::span<const double> delta) {
    double peak = 0.0;
    for (double d : delta) {
        peak = std::max(peak, std::abs(d));
    }
    std::vector<double> out(delta.size(), 0.5);
    if (peak > 0.0) {
        for (std::size_t i = 0; i < delta.size(); ++i) {
            out[i] = 0.5 + 0.5 * delta[i] / peak;
        }
    }
    return out;
}

inline GrayImage to_gray(std::span<const double> v, std::size_t w, std::size_t h) {
    GrayImage img{w, h, {}};
    img.pixels.reserve(v.size());
    for (double x : v) {
        img.pixels.push_back(quantize(x));
    }
    return img;
}

/**
 * @brief Writes up to `count` examples of `set` below `dir`.
 *
 * Returns the index table; file names are relative to `dir`.
 */
inline CsvTable export_perturbations(const AttackSet &set, const std::filesystem::path &dir,
                                     std::size_t count) {
    if (set.examples.empty()) {
        throw DataError("cannot export an empty attack set");
    }
    std::filesystem::create_directories(dir);
    CsvTable index({"example", "label", "original_prediction", "adversarial_prediction",
                    "max_abs_delta", "original", "delta", "perturbed"});
    const std::size_t n = std::min(count, set.examples.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto &ex = set.examples[i];
        const std::string stem = "ex" + std::to_string(i);
        double peak = 0.0;
        for (double d : ex.delta) {
            peak = std::max(peak, std::abs(d));
        }
        write_pgm(dir / (stem + "_original.pgm"), to_gray(ex.original, set.width, set.height));
        write_pgm(dir / (stem + "_delta.pgm"),
                  to_gray(delta_display(ex.delta), set.width, set.height));
        write_pgm(dir / (stem + "_perturbed.pgm"), to_gray(ex.perturbed, set.width, set.height));
        index.row({num(i), num(ex.label), num(ex.original_prediction),
                   num(ex.adversarial_prediction), num(peak), stem + "_original.pgm",
                   stem + "_delta.pgm", stem + "_perturbed.pgm"});
    }
    return index;
}

} // namespace qrobust::harness
