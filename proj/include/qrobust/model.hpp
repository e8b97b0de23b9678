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
 * Classifier concepts shared by attacks, trainers and the harness.
 */
#pragma once

#include <algorithm>
#include <concepts>
#include <exception>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

namespace qrobust {

struct Sample {
    std::span<const double> x;
    std::size_t label;
};

struct InputGradient {
    double loss = 0.0;
    std::vector<double> grad; ///< dL/dx, one entry per pixel
};

struct BatchGradient {
    double loss = 0.0;          ///< mean over the batch
    std::vector<double> params; ///< mean dL/dtheta
};

template <class M>
concept Classifier = requires(const M &m, std::span<const double> x) {
    { m.num_classes() } -> std::convertible_to<std::size_t>;
    { m.predict(x) } -> std::convertible_to<std::size_t>;
    { m.probabilities(x) } -> std::same_as<std::vector<double>>;
};

/// Exposes input gradients of the cross-entropy loss (white-box attack target).
template <class M>
concept DifferentiableClassifier =
    Classifier<M> && requires(const M &m, std::span<const double> x, std::size_t label) {
        { m.loss_and_input_grad(x, label) } -> std::same_as<InputGradient>;
    };

template <class M>
concept TrainableClassifier =
    DifferentiableClassifier<M> && requires(M &m, const M &cm, std::span<const Sample> batch) {
        { m.parameters() } -> std::same_as<std::span<double>>;
        { cm.batch_loss_and_grads(batch) } -> std::same_as<BatchGradient>;
    };

/// Worker count used by the data-parallel helpers.
inline std::size_t default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

/**
 * @brief Evaluates fn(i) for i in [0, n) across threads.
 *
 * Results land in index order, so any later reduction is independent of the
 * thread count.
 */
template <class Fn>
auto parallel_map(std::size_t n, Fn &&fn, std::size_t threads = default_threads())
    -> std::vector<decltype(fn(std::size_t{}))> {
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(n);
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = fn(i);
        }
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < n; i += threads) {
                        out[i] = fn(i);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

} // namespace qrobust
