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
 * Quantum variational classifier: amplitude encoding, layered Rot + open-chain
 * CZ ansatz, <Z_k> readout on the first m qubits, softmax probability head.
 */
#pragma once

#include "qrobust/adjoint.hpp"
#include "qrobust/encoding.hpp"
#include "qrobust/error.hpp"
#include "qrobust/gates.hpp"
#include "qrobust/model.hpp"
#include "qrobust/optim.hpp"

#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qrobust {

struct QvcOutput {
    std::vector<double> readouts;
    std::vector<double> probs;
};

class QvcModel {
  public:
    /// Angles drawn uniformly from [0, 2pi) with a seeded generator.
    QvcModel(std::size_t num_qubits, std::size_t num_layers, std::size_t num_classes,
             std::uint64_t seed = 0, double temperature = 1.0)
        : num_qubits_(num_qubits), num_layers_(num_layers), num_classes_(num_classes),
          seed_(seed), temperature_(temperature) {
        validate();
        thetas_.resize(parameter_count());
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        for (auto &t : thetas_) {
            t = angle(rng);
        }
    }

    /// Model with explicit angles, laid out [layer][qubit][phi, theta, omega].
    static QvcModel with_parameters(std::size_t num_qubits, std::size_t num_layers,
                                    std::size_t num_classes, std::vector<double> thetas,
                                    std::uint64_t seed = 0, double temperature = 1.0) {
        QvcModel m(num_qubits, 0, num_classes, seed, temperature);
        m.num_layers_ = num_layers;
        if (thetas.size() != m.parameter_count()) {
            throw ConfigurationError("QVC parameter block has " +
                                     std::to_string(thetas.size()) + " entries, expected " +
                                     std::to_string(m.parameter_count()));
        }
        m.thetas_ = std::move(thetas);
        return m;
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t num_layers() const noexcept { return num_layers_; }
    [[nodiscard]] std::size_t num_classes() const noexcept { return num_classes_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] double temperature() const noexcept { return temperature_; }

    [[nodiscard]] std::size_t parameter_count() const noexcept {
        return num_layers_ * num_qubits_ * 3;
    }
    /// Elementary gates per layer: 3 rotations per qubit plus n-1 CZs.
    [[nodiscard]] std::size_t gates_per_layer() const noexcept {
        return 3 * num_qubits_ + (num_qubits_ - 1);
    }

    [[nodiscard]] std::span<double> parameters() noexcept { return thetas_; }
    [[nodiscard]] std::span<const double> parameters() const noexcept { return thetas_; }

    [[nodiscard]] std::size_t slot(std::size_t layer, std::size_t qubit,
                                   std::size_t component) const noexcept {
        return (layer * num_qubits_ + qubit) * 3 + component;
    }

    [[nodiscard]] Circuit layer_circuit(std::size_t layer) const {
        Circuit c;
        c.reserve(2 * num_qubits_);
        for (std::size_t q = 0; q < num_qubits_; ++q) {
            const std::size_t s = slot(layer, q, 0);
            c.push_back(Gate::rot(q, thetas_[s], thetas_[s + 1], thetas_[s + 2],
                                  {s, s + 1, s + 2}));
        }
        for (std::size_t q = 0; q + 1 < num_qubits_; ++q) {
            c.push_back(Gate::cz(q, q + 1));
        }
        return c;
    }

    [[nodiscard]] std::vector<Circuit> layered_circuit() const {
        std::vector<Circuit> layers;
        layers.reserve(num_layers_);
        for (std::size_t l = 0; l < num_layers_; ++l) {
            layers.push_back(layer_circuit(l));
        }
        return layers;
    }

    [[nodiscard]] Circuit circuit() const {
        Circuit c;
        for (std::size_t l = 0; l < num_layers_; ++l) {
            auto layer = layer_circuit(l);
            c.insert(c.end(), layer.begin(), layer.end());
        }
        return c;
    }

    [[nodiscard]] StateVector encode_input(std::span<const double> x) const {
        return encode(x, num_qubits_);
    }

    [[nodiscard]] QvcOutput forward(std::span<const double> x) const {
        const StateVector out = apply_circuit(encode_input(x), circuit());
        QvcOutput r;
        r.readouts = expectations_z(out, num_classes_);
        r.probs = softmax(r.readouts, temperature_);
        return r;
    }

    [[nodiscard]] std::vector<double> probabilities(std::span<const double> x) const {
        return forward(x).probs;
    }

    /// argmax of the raw readouts, ties to the lowest class.
    [[nodiscard]] std::size_t predict(std::span<const double> x) const {
        return argmax(forward(x).readouts);
    }

    /// Cross-entropy and its gradient with respect to the pixels.
    [[nodiscard]] InputGradient loss_and_input_grad(std::span<const double> x,
                                                    std::size_t label) const {
        check_label(label);
        const Circuit c = circuit();
        const AdjointTape tape(c, encode_input(x), parameter_count());
        const auto readouts = tape.readouts(num_classes_);
        const auto probs = softmax(readouts, temperature_);
        const auto cot = softmax_cross_entropy_grad(probs, label, temperature_);
        const auto grads = tape.backward(cot, false, true);
        std::vector<double> amp_grad(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            amp_grad[i] = grads.input[i].real();
        }
        return {cross_entropy(probs, label), encode_vjp(x, amp_grad)};
    }

    /// Mean cross-entropy over the batch and its parameter gradient.
    [[nodiscard]] BatchGradient batch_loss_and_grads(std::span<const Sample> batch) const {
        if (batch.empty()) {
            throw DataError("empty batch");
        }
        for (const auto &s : batch) {
            check_label(s.label);
        }
        const Circuit c = circuit();
        struct PerExample {
            double loss;
            std::vector<double> grad;
        };
        auto per = parallel_map(batch.size(), [&](std::size_t i) {
            const AdjointTape tape(c, encode_input(batch[i].x), parameter_count());
            const auto probs = softmax(tape.readouts(num_classes_), temperature_);
            const auto cot = softmax_cross_entropy_grad(probs, batch[i].label, temperature_);
            return PerExample{cross_entropy(probs, batch[i].label),
                              tape.backward(cot, true, false).params};
        });
        BatchGradient out;
        out.params.assign(parameter_count(), 0.0);
        for (const auto &p : per) {
            out.loss += p.loss;
            for (std::size_t j = 0; j < p.grad.size(); ++j) {
                out.params[j] += p.grad[j];
            }
        }
        const double inv = 1.0 / static_cast<double>(batch.size());
        out.loss *= inv;
        for (auto &g : out.params) {
            g *= inv;
        }
        return out;
    }

    [[nodiscard]] BatchGradient loss_and_grads(std::span<const Sample> batch) const {
        return batch_loss_and_grads(batch);
    }

  private:
    void validate() const {
        if (num_qubits_ == 0 || num_qubits_ > 20) {
            throw ConfigurationError("QVC num_qubits must be in [1, 20]");
        }
        if (num_classes_ == 0 || num_classes_ > num_qubits_) {
            throw ConfigurationError("QVC num_classes must be in [1, num_qubits]; got " +
                                     std::to_string(num_classes_) + " classes on " +
                                     std::to_string(num_qubits_) + " qubits");
        }
        if (!(temperature_ > 0.0)) {
            throw ConfigurationError("QVC temperature must be positive");
        }
    }

    void check_label(std::size_t label) const {
        if (label >= num_classes_) {
            throw DataError("label " + std::to_string(label) + " out of range for " +
                            std::to_string(num_classes_) + " classes");
        }
    }

    std::size_t num_qubits_;
    std::size_t num_layers_;
    std::size_t num_classes_;
    std::uint64_t seed_;
    double temperature_;
    std::vector<double> thetas_;
};

} // namespace qrobust
