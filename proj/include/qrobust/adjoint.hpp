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
 * Reverse-mode (adjoint) gradients of L = sum_k c_k <Z_k> with respect to
 * circuit parameters and input amplitudes, plus a parameter-shift oracle.
 *
 * One forward pass records the final state; the reverse sweep undoes each
 * gate on both the state and the adjoint vector lambda = U_after^dag O phi.
 * For a rotation exp(-i a P / 2) the derivative contribution is
 * Im(<lambda| P |psi_after>).
 */
#pragma once

#include "qrobust/error.hpp"
#include "qrobust/gates.hpp"
#include "qrobust/state_vector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qrobust {

struct AdjointGradients {
    std::vector<double> params;
    /// dL/dRe(a_i) in the real part, dL/dIm(a_i) in the imaginary part.
    std::vector<complex_t> input;
};

/// Decomposes Rot into RZ/RY so every parameterized gate carries one slot.
inline Circuit expand_to_primitives(std::span<const Gate> circuit) {
    Circuit out;
    out.reserve(circuit.size() * 2);
    for (const auto &g : circuit) {
        switch (g.kind) {
        case GateKind::RZ:
        case GateKind::RY:
        case GateKind::CZ:
        case GateKind::PauliX:
            out.push_back(g);
            break;
        case GateKind::Rot:
            out.push_back(Gate::rz(g.wires[0], g.params[0], g.slots[0]));
            out.push_back(Gate::ry(g.wires[0], g.params[1], g.slots[1]));
            out.push_back(Gate::rz(g.wires[0], g.params[2], g.slots[2]));
            break;
        default:
            throw CapabilityError("gate kind has no known derivative");
        }
    }
    return out;
}

/// One past the largest slot referenced by the circuit.
inline std::size_t infer_param_count(std::span<const Gate> circuit) {
    std::size_t count = 0;
    for (const auto &g : circuit) {
        for (std::size_t i = 0; i < g.num_params(); ++i) {
            if (g.slots[i] != no_slot) {
                count = std::max(count, g.slots[i] + 1);
            }
        }
    }
    return count;
}

/**
 * @brief Forward record of a circuit evaluation, ready for reverse sweeps.
 *
 * The tape is immutable after recording; `backward` may be called any
 * number of times with different cotangents.
 */
class AdjointTape {
  public:
    AdjointTape(std::span<const Gate> circuit, StateVector input)
        : AdjointTape(circuit, std::move(input), infer_param_count(circuit)) {}

    AdjointTape(std::span<const Gate> circuit, StateVector input,
                std::size_t param_count)
        : forward_final_state_(std::move(input)),
          gate_sequence_(expand_to_primitives(circuit)), param_count_(param_count) {
        for (const auto &g : gate_sequence_) {
            validate_gate(g, forward_final_state_.num_qubits());
            if (g.num_params() == 1 && g.slots[0] != no_slot &&
                g.slots[0] >= param_count_) {
                throw ConfigurationError("parameter slot " + std::to_string(g.slots[0]) +
                                         " exceeds param_count " +
                                         std::to_string(param_count_));
            }
        }
        apply_circuit_inplace(forward_final_state_, gate_sequence_);
    }

    [[nodiscard]] const StateVector &final_state() const noexcept {
        return forward_final_state_;
    }
    [[nodiscard]] std::span<const Gate> gate_sequence() const noexcept {
        return gate_sequence_;
    }
    [[nodiscard]] std::size_t param_count() const noexcept { return param_count_; }

    [[nodiscard]] std::vector<double> readouts(std::size_t count) const {
        return expectations_z(forward_final_state_, count);
    }

    /// Reverse sweep for L = sum_k cotangent[k] <Z_k>.
    [[nodiscard]] AdjointGradients backward(std::span<const double> cotangent,
                                            bool want_params = true,
                                            bool want_input = true) const {
        const std::size_t n = forward_final_state_.num_qubits();
        if (cotangent.size() > n) {
            throw ConfigurationError("cotangent has more entries than qubits");
        }
        AdjointGradients out;
        if (want_params) {
            out.params.assign(param_count_, 0.0);
        }

        StateVector phi = forward_final_state_;
        StateVector lambda = observable_applied(phi, cotangent);
        StateVector scratch = phi;

        for (auto it = gate_sequence_.rbegin(); it != gate_sequence_.rend(); ++it) {
            const Gate &g = *it;
            const bool trainable = want_params && g.num_params() == 1 && g.slots[0] != no_slot;
            if (trainable) {
                std::ranges::copy(phi.amplitudes(), scratch.amplitudes().begin());
                if (g.kind == GateKind::RY) {
                    kernels::apply_y(scratch.amplitudes(), g.wires[0]);
                } else {
                    kernels::apply_z(scratch.amplitudes(), g.wires[0]);
                }
                out.params[g.slots[0]] +=
                    std::imag(inner_product(lambda.amplitudes(), scratch.amplitudes()));
            }
            const Gate inv = g.inverse();
            apply_gate_inplace(phi, inv);
            apply_gate_inplace(lambda, inv);
        }

        if (want_input) {
            out.input.resize(lambda.size());
            for (std::size_t i = 0; i < lambda.size(); ++i) {
                out.input[i] = 2.0 * lambda[i];
            }
        }
        return out;
    }

  private:
    static StateVector observable_applied(const StateVector &phi,
                                          std::span<const double> cotangent) {
        StateVector out = phi;
        auto amps = out.amplitudes();
        const auto src = phi.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i) {
            double w = 0.0;
            for (std::size_t k = 0; k < cotangent.size(); ++k) {
                w += (i >> k & 1U) ? -cotangent[k] : cotangent[k];
            }
            amps[i] = w * src[i];
        }
        return out;
    }

    StateVector forward_final_state_;
    Circuit gate_sequence_;
    std::size_t param_count_;
};

/// dL/dtheta for every slot.
inline std::vector<double> grad_params(std::span<const Gate> circuit,
                                       const StateVector &input_state,
                                       std::span<const double> loss_cotangent) {
    return AdjointTape(circuit, input_state).backward(loss_cotangent, true, false).params;
}

/// dL/da_i with amplitudes treated as independent (Re, Im) coordinate pairs.
inline std::vector<complex_t> grad_input(std::span<const Gate> circuit,
                                         const StateVector &input_state,
                                         std::span<const double> loss_cotangent) {
    return AdjointTape(circuit, input_state).backward(loss_cotangent, false, true).input;
}

/// L = sum_k c_k <Z_k> of the circuit output.
inline double weighted_readout(std::span<const Gate> circuit, const StateVector &input_state,
                               std::span<const double> loss_cotangent) {
    const StateVector out = apply_circuit(input_state, circuit);
    double acc = 0.0;
    for (std::size_t k = 0; k < loss_cotangent.size(); ++k) {
        acc += loss_cotangent[k] * expectation_z(out, k);
    }
    return acc;
}

/**
 * @brief Parameter-shift derivative for one slot.
 *
 * Every rotation occurrence of the slot is shifted by +-pi/2 in turn and the
 * contributions summed, so shared slots are handled exactly.
 */
inline double param_shift_check(std::span<const Gate> circuit, const StateVector &input_state,
                                std::size_t parameter_index,
                                std::span<const double> loss_cotangent) {
    Circuit prim = expand_to_primitives(circuit);
    constexpr double shift = std::numbers::pi / 2;
    double grad = 0.0;
    bool found = false;
    for (auto &g : prim) {
        if (g.num_params() != 1 || g.slots[0] != parameter_index) {
            continue;
        }
        found = true;
        const double original = g.params[0];
        g.params[0] = original + shift;
        const double plus = weighted_readout(prim, input_state, loss_cotangent);
        g.params[0] = original - shift;
        const double minus = weighted_readout(prim, input_state, loss_cotangent);
        g.params[0] = original;
        grad += (plus - minus) / 2;
    }
    if (!found) {
        throw CapabilityError("parameter " + std::to_string(parameter_index) +
                              " is not bound to an RZ/RY rotation");
    }
    return grad;
}

} // namespace qrobust
