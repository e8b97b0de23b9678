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
 * Gate set {RZ, RY, Rot, CZ, PauliX} and in-place stride kernels.
 */
#pragma once

#include "qrobust/error.hpp"
#include "qrobust/state_vector.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace qrobust {

enum class GateKind { RZ, RY, Rot, CZ, PauliX };

inline constexpr std::size_t no_slot = std::numeric_limits<std::size_t>::max();

/**
 * @brief One gate application.
 *
 * Rotation angles live in `params` (radians). RZ/RY use `params[0]`; Rot uses
 * (phi, theta, omega) and acts as RZ(omega) RY(theta) RZ(phi). `slots[i]`
 * names the trainable parameter index backing `params[i]`, or `no_slot`.
 */
struct Gate {
    GateKind kind{GateKind::PauliX};
    std::array<std::size_t, 2> wires{0, 0};
    std::array<double, 3> params{0.0, 0.0, 0.0};
    std::array<std::size_t, 3> slots{no_slot, no_slot, no_slot};

    static Gate rz(std::size_t wire, double angle, std::size_t slot = no_slot) {
        return {GateKind::RZ, {wire, wire}, {angle, 0, 0}, {slot, no_slot, no_slot}};
    }
    static Gate ry(std::size_t wire, double angle, std::size_t slot = no_slot) {
        return {GateKind::RY, {wire, wire}, {angle, 0, 0}, {slot, no_slot, no_slot}};
    }
    static Gate rot(std::size_t wire, double phi, double theta, double omega,
                    std::array<std::size_t, 3> slots = {no_slot, no_slot, no_slot}) {
        return {GateKind::Rot, {wire, wire}, {phi, theta, omega}, slots};
    }
    static Gate cz(std::size_t control, std::size_t target) {
        return {GateKind::CZ, {control, target}, {0, 0, 0}, {no_slot, no_slot, no_slot}};
    }
    static Gate x(std::size_t wire) {
        return {GateKind::PauliX, {wire, wire}, {0, 0, 0}, {no_slot, no_slot, no_slot}};
    }

    [[nodiscard]] std::size_t num_params() const noexcept {
        switch (kind) {
        case GateKind::RZ:
        case GateKind::RY:
            return 1;
        case GateKind::Rot:
            return 3;
        default:
            return 0;
        }
    }

    /// Exact inverse: negated angles, Rot components reversed.
    [[nodiscard]] Gate inverse() const {
        Gate g = *this;
        if (kind == GateKind::Rot) {
            g.params = {-params[2], -params[1], -params[0]};
            g.slots = {slots[2], slots[1], slots[0]};
        } else {
            for (auto &p : g.params) {
                p = -p;
            }
        }
        return g;
    }

    friend bool operator==(const Gate &, const Gate &) = default;
};

using Circuit = std::vector<Gate>;

inline void validate_gate(const Gate &gate, std::size_t num_qubits) {
    if (gate.wires[0] >= num_qubits || gate.wires[1] >= num_qubits) {
        throw ConfigurationError("gate wire out of range for " +
                                 std::to_string(num_qubits) + "-qubit register");
    }
    if (gate.kind == GateKind::CZ && gate.wires[0] == gate.wires[1]) {
        throw ConfigurationError("CZ wires must be distinct");
    }
}

namespace kernels {

/// Generic 2x2 unitary [[m00, m01], [m10, m11]] on `wire`.
inline void apply_single(std::span<complex_t> amps, std::size_t wire, complex_t m00,
                         complex_t m01, complex_t m10, complex_t m11) {
    const std::size_t stride = std::size_t{1} << wire;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + stride;
            const complex_t a0 = amps[i0];
            const complex_t a1 = amps[i1];
            amps[i0] = m00 * a0 + m01 * a1;
            amps[i1] = m10 * a0 + m11 * a1;
        }
    }
}

inline void apply_ry(std::span<complex_t> amps, std::size_t wire, double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    const std::size_t stride = std::size_t{1} << wire;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + stride;
            const complex_t a0 = amps[i0];
            const complex_t a1 = amps[i1];
            amps[i0] = c * a0 - s * a1;
            amps[i1] = s * a0 + c * a1;
        }
    }
}

inline void apply_rz(std::span<complex_t> amps, std::size_t wire, double theta) {
    const complex_t lo = std::polar(1.0, -theta / 2);
    const complex_t hi = std::polar(1.0, theta / 2);
    const std::size_t mask = std::size_t{1} << wire;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        amps[i] *= (i & mask) ? hi : lo;
    }
}

inline void apply_cz(std::span<complex_t> amps, std::size_t a, std::size_t b) {
    const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & mask) == mask) {
            amps[i] = -amps[i];
        }
    }
}

inline void apply_x(std::span<complex_t> amps, std::size_t wire) {
    const std::size_t stride = std::size_t{1} << wire;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            std::swap(amps[base + off], amps[base + off + stride]);
        }
    }
}

/// Pauli Y on `wire` (generator of RY).
inline void apply_y(std::span<complex_t> amps, std::size_t wire) {
    const complex_t i_unit{0.0, 1.0};
    const std::size_t stride = std::size_t{1} << wire;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + stride;
            const complex_t a0 = amps[i0];
            const complex_t a1 = amps[i1];
            amps[i0] = -i_unit * a1;
            amps[i1] = i_unit * a0;
        }
    }
}

/// Pauli Z on `wire` (generator of RZ).
inline void apply_z(std::span<complex_t> amps, std::size_t wire) {
    const std::size_t mask = std::size_t{1} << wire;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & mask) {
            amps[i] = -amps[i];
        }
    }
}

} // namespace kernels

/// In-place U|state>. Throws ConfigurationError on bad wires.
inline void apply_gate_inplace(StateVector &state, const Gate &gate) {
    validate_gate(gate, state.num_qubits());
    auto amps = state.amplitudes();
    const std::size_t w = gate.wires[0];
    switch (gate.kind) {
    case GateKind::RZ:
        kernels::apply_rz(amps, w, gate.params[0]);
        break;
    case GateKind::RY:
        kernels::apply_ry(amps, w, gate.params[0]);
        break;
    case GateKind::Rot:
        kernels::apply_rz(amps, w, gate.params[0]);
        kernels::apply_ry(amps, w, gate.params[1]);
        kernels::apply_rz(amps, w, gate.params[2]);
        break;
    case GateKind::CZ:
        kernels::apply_cz(amps, w, gate.wires[1]);
        break;
    case GateKind::PauliX:
        kernels::apply_x(amps, w);
        break;
    }
}

inline StateVector apply_gate(StateVector state, const Gate &gate) {
    apply_gate_inplace(state, gate);
    return state;
}

inline void apply_circuit_inplace(StateVector &state, std::span<const Gate> circuit) {
    for (const auto &g : circuit) {
        apply_gate_inplace(state, g);
    }
}

inline StateVector apply_circuit(StateVector state, std::span<const Gate> circuit) {
    apply_circuit_inplace(state, circuit);
    return state;
}

/// Reversed order, each gate inverted.
inline Circuit inverse_circuit(std::span<const Gate> circuit) {
    Circuit out;
    out.reserve(circuit.size());
    for (auto it = circuit.rbegin(); it != circuit.rend(); ++it) {
        out.push_back(it->inverse());
    }
    return out;
}

/// Number of elementary gates, counting Rot as three rotations.
inline std::size_t elementary_gate_count(std::span<const Gate> circuit) {
    std::size_t n = 0;
    for (const auto &g : circuit) {
        n += g.kind == GateKind::Rot ? 3 : 1;
    }
    return n;
}

} // namespace qrobust
