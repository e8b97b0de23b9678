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
 * Dense state-vector register. Qubit 0 is the least-significant bit of the
 * basis-state index.
 */
#pragma once

#include "qrobust/error.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qrobust {

using complex_t = std::complex<double>;

class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(std::size_t num_qubits)
        : num_qubits_(num_qubits), amplitudes_(dimension_for(num_qubits)) {
        amplitudes_[0] = 1.0;
    }

    /// Takes ownership of `amplitudes`; the length must be a power of two.
    explicit StateVector(std::vector<complex_t> amplitudes)
        : amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() < 2 || !std::has_single_bit(amplitudes_.size())) {
            throw ConfigurationError("state vector length " +
                                     std::to_string(amplitudes_.size()) +
                                     " is not a power of two >= 2");
        }
        num_qubits_ = static_cast<std::size_t>(std::countr_zero(amplitudes_.size()));
    }

    static StateVector basis(std::size_t num_qubits, std::size_t index) {
        StateVector s(num_qubits);
        if (index >= s.size()) {
            throw ConfigurationError("basis index out of range");
        }
        s.amplitudes_[0] = 0.0;
        s.amplitudes_[index] = 1.0;
        return s;
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }

    [[nodiscard]] std::span<complex_t> amplitudes() noexcept { return amplitudes_; }
    [[nodiscard]] std::span<const complex_t> amplitudes() const noexcept {
        return amplitudes_;
    }
    complex_t &operator[](std::size_t i) { return amplitudes_[i]; }
    const complex_t &operator[](std::size_t i) const { return amplitudes_[i]; }

    [[nodiscard]] double norm() const {
        double acc = 0.0;
        for (const auto &a : amplitudes_) {
            acc += std::norm(a);
        }
        return std::sqrt(acc);
    }

    void normalize() {
        const double n = norm();
        if (n == 0.0) {
            throw DegenerateInputError("cannot normalize a zero state vector");
        }
        for (auto &a : amplitudes_) {
            a /= n;
        }
    }

    friend bool operator==(const StateVector &, const StateVector &) = default;

  private:
    static std::size_t dimension_for(std::size_t num_qubits) {
        if (num_qubits == 0 || num_qubits > 30) {
            throw ConfigurationError("num_qubits must be in [1, 30], got " +
                                     std::to_string(num_qubits));
        }
        return std::size_t{1} << num_qubits;
    }

    std::size_t num_qubits_{};
    std::vector<complex_t> amplitudes_;
};

/// <a|b> with the first argument conjugated.
inline complex_t inner_product(std::span<const complex_t> a,
                               std::span<const complex_t> b) {
    complex_t acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

/// Born-rule <Z_qubit>. Deterministic, no sampling.
inline double expectation_z(const StateVector &state, std::size_t qubit) {
    if (qubit >= state.num_qubits()) {
        throw ConfigurationError("expectation_z: qubit " + std::to_string(qubit) +
                                 " out of range for " +
                                 std::to_string(state.num_qubits()) + " qubits");
    }
    const std::size_t mask = std::size_t{1} << qubit;
    double acc = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        acc += (i & mask) ? -p : p;
    }
    return acc;
}

/// <Z_k> for k = 0..count-1.
inline std::vector<double> expectations_z(const StateVector &state, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = expectation_z(state, k);
    }
    return out;
}

} // namespace qrobust
