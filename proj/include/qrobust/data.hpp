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
 * Grayscale datasets: IDX ingestion (optionally gzipped), lossless cache
 * files, area-average downscaling, synthetic blobs and seeded splits.
 *
 * Cache file layout (all little-endian):
 *   "QRDS" | u64 version=1 | u64 width | u64 height | u64 class_count |
 *   u64 count | u64 tag_len | split tag bytes | count x u64 label |
 *   count*width*height x f64 pixel
 */
#pragma once

#include "qrobust/binary_io.hpp"
#include "qrobust/error.hpp"
#include "qrobust/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qrobust {

struct Dataset {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t class_count = 0;
    std::string split;
    std::vector<double> pixels; ///< row-major images, back to back
    std::vector<std::size_t> labels;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    [[nodiscard]] bool empty() const noexcept { return labels.empty(); }
    [[nodiscard]] std::size_t pixel_count() const noexcept { return width * height; }

    [[nodiscard]] std::span<const double> image(std::size_t i) const {
        return std::span<const double>(pixels).subspan(i * pixel_count(), pixel_count());
    }
    [[nodiscard]] Sample sample(std::size_t i) const { return {image(i), labels[i]}; }

    void push_back(std::span<const double> img, std::size_t label) {
        if (img.size() != pixel_count()) {
            throw ConfigurationError("image size mismatch");
        }
        pixels.insert(pixels.end(), img.begin(), img.end());
        labels.push_back(label);
    }

    friend bool operator==(const Dataset &, const Dataset &) = default;
};

/// Checks the dataset invariants; throws DataError.
inline void validate_dataset(const Dataset &ds) {
    if (ds.pixels.size() != ds.size() * ds.pixel_count()) {
        throw DataError("pixel buffer does not match image count");
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.labels[i] >= ds.class_count) {
            throw DataError("label " + std::to_string(ds.labels[i]) + " at index " +
                            std::to_string(i) + " out of range for " +
                            std::to_string(ds.class_count) + " classes");
        }
    }
    for (double v : ds.pixels) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DataError("pixel value outside [0, 1]");
        }
    }
}

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/**
 * @brief Loads an IDX image/label pair. Pixels are scaled by 1/255.
 *
 * Either file may be gzip-compressed. Any structural problem raises
 * FormatError naming the byte offset; no partial dataset is returned.
 */
inline Dataset load_idx(const std::string &images_path, const std::string &labels_path,
                        std::size_t class_count = 10) {
    const auto img = io::read_file_bytes(images_path);
    const auto lab = io::read_file_bytes(labels_path);
    if (img.size() < 16) {
        throw FormatError(images_path + ": header truncated at offset " +
                          std::to_string(img.size()) + " (need 16 bytes)");
    }
    if (lab.size() < 8) {
        throw FormatError(labels_path + ": header truncated at offset " +
                          std::to_string(lab.size()) + " (need 8 bytes)");
    }
    if (const auto m = io::get_u32_be(img, 0); m != kIdxImageMagic) {
        throw FormatError(images_path + ": bad magic at offset 0 (" + std::to_string(m) +
                          ", expected 2051)");
    }
    if (const auto m = io::get_u32_be(lab, 0); m != kIdxLabelMagic) {
        throw FormatError(labels_path + ": bad magic at offset 0 (" + std::to_string(m) +
                          ", expected 2049)");
    }
    const std::size_t count = io::get_u32_be(img, 4);
    const std::size_t rows = io::get_u32_be(img, 8);
    const std::size_t cols = io::get_u32_be(img, 12);
    const std::size_t label_count = io::get_u32_be(lab, 4);
    if (count != label_count) {
        throw FormatError("image count " + std::to_string(count) + " (offset 4 of " +
                          images_path + ") differs from label count " +
                          std::to_string(label_count) + " (offset 4 of " + labels_path + ")");
    }
    const std::size_t expected = 16 + count * rows * cols;
    if (img.size() != expected) {
        throw FormatError(images_path + ": payload ends at offset " +
                          std::to_string(img.size()) + ", expected " +
                          std::to_string(expected));
    }
    if (lab.size() != 8 + count) {
        throw FormatError(labels_path + ": payload ends at offset " +
                          std::to_string(lab.size()) + ", expected " +
                          std::to_string(8 + count));
    }
    Dataset ds;
    ds.width = cols;
    ds.height = rows;
    ds.class_count = class_count;
    ds.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t label = lab[8 + i];
        if (label >= class_count) {
            throw DataError(labels_path + ": label " + std::to_string(label) + " at offset " +
                            std::to_string(8 + i) + " out of range for " +
                            std::to_string(class_count) + " classes");
        }
        ds.labels[i] = label;
    }
    ds.pixels.resize(count * rows * cols);
    for (std::size_t i = 0; i < ds.pixels.size(); ++i) {
        ds.pixels[i] = img[16 + i] / 255.0;
    }
    return ds;
}

/// Writes the dataset as IDX (pixels quantized to bytes).
inline void write_idx(const Dataset &ds, const std::string &images_path,
                      const std::string &labels_path) {
    std::vector<std::uint8_t> img;
    img.reserve(16 + ds.pixels.size());
    io::put_u32_be(img, kIdxImageMagic);
    io::put_u32_be(img, static_cast<std::uint32_t>(ds.size()));
    io::put_u32_be(img, static_cast<std::uint32_t>(ds.height));
    io::put_u32_be(img, static_cast<std::uint32_t>(ds.width));
    for (double v : ds.pixels) {
        img.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    }
    std::vector<std::uint8_t> lab;
    lab.reserve(8 + ds.size());
    io::put_u32_be(lab, kIdxLabelMagic);
    io::put_u32_be(lab, static_cast<std::uint32_t>(ds.size()));
    for (auto l : ds.labels) {
        if (l > 255) {
            throw DataError("label does not fit in an IDX byte");
        }
        lab.push_back(static_cast<std::uint8_t>(l));
    }
    io::write_file_bytes(images_path, img);
    io::write_file_bytes(labels_path, lab);
}

inline void save_dataset(const Dataset &ds, const std::string &path) {
    std::vector<std::uint8_t> out{'Q', 'R', 'D', 'S'};
    io::put_u64_le(out, 1);
    io::put_u64_le(out, ds.width);
    io::put_u64_le(out, ds.height);
    io::put_u64_le(out, ds.class_count);
    io::put_u64_le(out, ds.size());
    io::put_u64_le(out, ds.split.size());
    out.insert(out.end(), ds.split.begin(), ds.split.end());
    for (auto l : ds.labels) {
        io::put_u64_le(out, l);
    }
    for (double v : ds.pixels) {
        io::put_f64_le(out, v);
    }
    io::write_file_bytes(path, out);
}

inline Dataset load_dataset(const std::string &path) {
    const auto in = io::read_file_bytes(path);
    if (in.size() < 52 || in[0] != 'Q' || in[1] != 'R' || in[2] != 'D' || in[3] != 'S') {
        throw FormatError(path + ": not a dataset cache file");
    }
    if (io::get_u64_le(in, 4) != 1) {
        throw FormatError(path + ": unsupported cache version");
    }
    Dataset ds;
    ds.width = io::get_u64_le(in, 12);
    ds.height = io::get_u64_le(in, 20);
    ds.class_count = io::get_u64_le(in, 28);
    const std::size_t n = io::get_u64_le(in, 36);
    const std::size_t tag = io::get_u64_le(in, 44);
    if (tag > in.size() - 52) {
        throw FormatError(path + ": split tag at offset 44 overruns the file");
    }
    ds.split.assign(in.begin() + 52, in.begin() + 52 + static_cast<std::ptrdiff_t>(tag));
    const std::size_t expected = 52 + tag + n * 8 + n * ds.pixel_count() * 8;
    if (in.size() != expected) {
        throw FormatError(path + ": payload ends at offset " + std::to_string(in.size()) +
                          ", expected " + std::to_string(expected));
    }
    std::size_t off = 52 + tag;
    ds.labels.resize(n);
    for (auto &l : ds.labels) {
        l = io::get_u64_le(in, off);
        off += 8;
    }
    ds.pixels.resize(n * ds.pixel_count());
    for (auto &v : ds.pixels) {
        v = io::get_f64_le(in, off);
        off += 8;
    }
    validate_dataset(ds);
    return ds;
}

/// Area-average resampling; each target pixel averages the source area it
/// covers, with fractional weights at the edges.
inline Dataset downscale(const Dataset &ds, std::size_t target_width, std::size_t target_height) {
    if (target_width == 0 || target_height == 0 || target_width > ds.width ||
        target_height > ds.height) {
        throw ConfigurationError("downscale target " + std::to_string(target_width) + "x" +
                                 std::to_string(target_height) + " invalid for source " +
                                 std::to_string(ds.width) + "x" + std::to_string(ds.height));
    }
    // weights[t] lists (source index, weight) pairs for one axis
    auto axis_weights = [](std::size_t src, std::size_t dst) {
        std::vector<std::vector<std::pair<std::size_t, double>>> w(dst);
        const double scale = static_cast<double>(src) / static_cast<double>(dst);
        for (std::size_t t = 0; t < dst; ++t) {
            const double lo = t * scale;
            const double hi = (t + 1) * scale;
            for (auto s = static_cast<std::size_t>(std::floor(lo)); s < src && s < hi; ++s) {
                const double overlap =
                    std::min(hi, static_cast<double>(s + 1)) - std::max(lo, static_cast<double>(s));
                if (overlap > 0.0) {
                    w[t].emplace_back(s, overlap / scale);
                }
            }
        }
        return w;
    };
    const auto wy = axis_weights(ds.height, target_height);
    const auto wx = axis_weights(ds.width, target_width);

    Dataset out;
    out.width = target_width;
    out.height = target_height;
    out.class_count = ds.class_count;
    out.split = ds.split;
    out.labels = ds.labels;
    out.pixels.resize(ds.size() * target_width * target_height);
    for (std::size_t n = 0; n < ds.size(); ++n) {
        const auto src = ds.image(n);
        double *dst = &out.pixels[n * out.pixel_count()];
        for (std::size_t ty = 0; ty < target_height; ++ty) {
            for (std::size_t tx = 0; tx < target_width; ++tx) {
                double acc = 0.0;
                for (const auto &[sy, fy] : wy[ty]) {
                    for (const auto &[sx, fx] : wx[tx]) {
                        acc += fy * fx * src[sy * ds.width + sx];
                    }
                }
                dst[ty * target_width + tx] = std::clamp(acc, 0.0, 1.0);
            }
        }
    }
    return out;
}

/**
 * @brief Seeded synthetic dataset of Gaussian blobs.
 *
 * Each class owns a blob centre on a ring; examples jitter the centre and
 * brightness and add a faint uniform background. Labels cycle 0..k-1.
 */
inline Dataset synth_blobs(std::size_t num_classes, std::size_t per_class, std::size_t width,
                           std::size_t height, std::uint64_t seed) {
    if (num_classes == 0 || width == 0 || height == 0) {
        throw ConfigurationError("synth_blobs needs positive class count and image size");
    }
    Dataset ds;
    ds.width = width;
    ds.height = height;
    ds.class_count = num_classes;
    ds.split = "synthetic";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;
    const double radius = 0.3 * static_cast<double>(std::min(width, height));
    const double sigma = std::max(0.6, 0.15 * static_cast<double>(std::min(width, height)));
    std::vector<double> img(width * height);
    for (std::size_t n = 0; n < num_classes * per_class; ++n) {
        const std::size_t c = n % num_classes;
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) /
                             static_cast<double>(num_classes);
        const double bx = cx + radius * std::cos(angle) + (unit(rng) - 0.5);
        const double by = cy + radius * std::sin(angle) + (unit(rng) - 0.5);
        const double amp = 0.7 + 0.3 * unit(rng);
        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                const double d2 = (x - bx) * (x - bx) + (y - by) * (y - by);
                const double v = amp * std::exp(-d2 / (2 * sigma * sigma)) + 0.1 * unit(rng);
                img[y * width + x] = std::clamp(v, 0.0, 1.0);
            }
        }
        ds.push_back(img, c);
    }
    return ds;
}

inline Dataset subset(const Dataset &ds, std::span<const std::size_t> indices) {
    Dataset out;
    out.width = ds.width;
    out.height = ds.height;
    out.class_count = ds.class_count;
    out.split = ds.split;
    out.pixels.reserve(indices.size() * ds.pixel_count());
    out.labels.reserve(indices.size());
    for (auto i : indices) {
        if (i >= ds.size()) {
            throw ConfigurationError("subset index out of range");
        }
        out.push_back(ds.image(i), ds.labels[i]);
    }
    return out;
}

/// Keeps only `classes`, relabelled to their position in the list.
inline Dataset select_classes(const Dataset &ds, std::span<const std::size_t> classes) {
    Dataset out;
    out.width = ds.width;
    out.height = ds.height;
    out.class_count = classes.size();
    out.split = ds.split;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto it = std::ranges::find(classes, ds.labels[i]);
        if (it != classes.end()) {
            out.push_back(ds.image(i), static_cast<std::size_t>(it - classes.begin()));
        }
    }
    return out;
}

/// Seeded permutation of [0, n).
inline std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

/// Fixed-size evaluation subset (e.g. the 250-image attack sets).
inline Dataset sample_subset(const Dataset &ds, std::size_t n, std::uint64_t seed) {
    if (n > ds.size()) {
        throw ConfigurationError("requested " + std::to_string(n) + " of " +
                                 std::to_string(ds.size()) + " examples");
    }
    auto idx = seeded_permutation(ds.size(), seed);
    idx.resize(n);
    auto out = subset(ds, idx);
    out.split = ds.split + "-subset";
    return out;
}

struct Split {
    Dataset train;
    Dataset test;
    Dataset rest; ///< examples in neither split
};

/// Disjoint seeded train/test split.
inline Split split_dataset(const Dataset &ds, std::size_t n_train, std::size_t n_test,
                           std::uint64_t seed) {
    if (n_train + n_test > ds.size()) {
        throw ConfigurationError("split of " + std::to_string(n_train) + "+" +
                                 std::to_string(n_test) + " exceeds " +
                                 std::to_string(ds.size()) + " examples");
    }
    const auto idx = seeded_permutation(ds.size(), seed);
    const std::span<const std::size_t> all(idx);
    Split s{subset(ds, all.first(n_train)), subset(ds, all.subspan(n_train, n_test)),
            subset(ds, all.subspan(n_train + n_test))};
    s.train.split = "train";
    s.test.split = "test";
    s.rest.split = "rest";
    return s;
}

} // namespace qrobust
