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
 * Softmax, clamped cross-entropy and the Adam optimizer shared by every
 * trainer.
 */
#pragma once

#include "qrobust/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qrobust {

inline constexpr double kProbabilityFloor = 1e-12;

/// softmax(z / temperature), max-shifted.
inline std::vector<double> softmax(std::span<const double> z, double temperature = 1.0) {
    if (z.empty()) {
        return {};
    }
    if (!(temperature > 0.0)) {
        throw ConfigurationError("softmax temperature must be positive");
    }
    const double zmax = *std::ranges::max_element(z);
    std::vector<double> out(z.size());
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp((z[i] - zmax) / temperature);
        total += out[i];
    }
    for (auto &p : out) {
        p /= total;
    }
    return out;
}

/// -log(max(probs[label], 1e-12)).
inline double cross_entropy(std::span<const double> probs, std::size_t label) {
    if (label >= probs.size()) {
        throw DataError("label " + std::to_string(label) + " out of range for " +
                        std::to_string(probs.size()) + " classes");
    }
    return -std::log(std::max(probs[label], kProbabilityFloor));
}

/// d cross_entropy(softmax(z / T), label) / dz = (p - onehot) / T.
inline std::vector<double> softmax_cross_entropy_grad(std::span<const double> probs,
                                                      std::size_t label,
                                                      double temperature = 1.0) {
    if (label >= probs.size()) {
        throw DataError("label out of range");
    }
    std::vector<double> g(probs.begin(), probs.end());
    g[label] -= 1.0;
    for (auto &v : g) {
        v /= temperature;
    }
    return g;
}

/// Index of the maximum; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) {
            best = i;
        }
    }
    return best;
}

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::size_t t = 0;
    std::vector<double> m;
    std::vector<double> v;

    AdamState() = default;
    AdamState(std::size_t size, AdamConfig cfg) : config(cfg), m(size, 0.0), v(size, 0.0) {}
};

/// Bias-corrected Adam update, in place on `params` and `state`.
inline void adam_step(std::span<double> params, std::span<const double> grads,
                      AdamState &state) {
    if (params.size() != grads.size() || state.m.size() != params.size() ||
        state.v.size() != params.size()) {
        throw ConfigurationError("adam_step: shape mismatch (params " +
                                 std::to_string(params.size()) + ", grads " +
                                 std::to_string(grads.size()) + ", moments " +
                                 std::to_string(state.m.size()) + ")");
    }
    const auto &c = state.config;
    state.t += 1;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grads[i];
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
}

} // namespace qrobust
