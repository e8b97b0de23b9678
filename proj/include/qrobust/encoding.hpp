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
 * Amplitude encoding of pixel vectors. Pixel i (row-major) maps to basis
 * index i; the vector is zero-padded to 2^n and divided by its l2 norm.
 */
#pragma once

#include "qrobust/error.hpp"
#include "qrobust/state_vector.hpp"

#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qrobust {

/// Smallest n with 2^n >= length (at least 1).
inline std::size_t qubits_for_length(std::size_t length) {
    if (length <= 2) {
        return 1;
    }
    return static_cast<std::size_t>(std::bit_width(length - 1));
}

inline double l2_norm(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

inline StateVector encode(std::span<const double> x, std::size_t num_qubits) {
    if (num_qubits == 0 || num_qubits > 30) {
        throw ConfigurationError("encode: num_qubits must be in [1, 30]");
    }
    const std::size_t dim = std::size_t{1} << num_qubits;
    if (x.size() > dim) {
        throw CapacityError("encode: " + std::to_string(x.size()) +
                            " values do not fit in " + std::to_string(num_qubits) +
                            " qubits");
    }
    const double norm = l2_norm(x);
    if (!(norm > 0.0)) {
        throw DegenerateInputError("encode: input vector has zero norm");
    }
    std::vector<complex_t> amps(dim);
    for (std::size_t i = 0; i < x.size(); ++i) {
        amps[i] = x[i] / norm;
    }
    return StateVector(std::move(amps));
}

/**
 * @brief Pulls an amplitude cotangent back to pixel space.
 *
 * Computes J^T c for J = (I - xhat xhat^T) / |x| on the unpadded coordinates.
 * Only the first x.size() entries of `amplitude_cotangent` are read.
 */
inline std::vector<double> encode_vjp(std::span<const double> x,
                                      std::span<const double> amplitude_cotangent) {
    if (amplitude_cotangent.size() < x.size()) {
        throw ConfigurationError("encode_vjp: cotangent shorter than input");
    }
    const double norm = l2_norm(x);
    if (!(norm > 0.0)) {
        throw DegenerateInputError("encode_vjp: input vector has zero norm");
    }
    double radial = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        radial += x[i] / norm * amplitude_cotangent[i];
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = (amplitude_cotangent[i] - radial * x[i] / norm) / norm;
    }
    return out;
}

} // namespace qrobust
