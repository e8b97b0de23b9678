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
 * Mini-batch Adam training shared by the QVC and classical models.
 */
#pragma once

#include "qrobust/classical.hpp"
#include "qrobust/data.hpp"
#include "qrobust/error.hpp"
#include "qrobust/model.hpp"
#include "qrobust/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qrobust {

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    AdamConfig adam{};
    std::uint64_t seed = 0;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double loss = 0.0; ///< mean training loss over the epoch's batches
    double train_accuracy = 0.0;
    double test_accuracy = -1.0; ///< -1 when no evaluation set was given
    friend bool operator==(const EpochRecord &, const EpochRecord &) = default;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    friend bool operator==(const TrainHistory &, const TrainHistory &) = default;
};

template <Classifier M>
double evaluate_accuracy(const M &model, const Dataset &ds) {
    if (ds.empty()) {
        throw DataError("accuracy over an empty dataset");
    }
    const auto hits = parallel_map(ds.size(), [&](std::size_t i) {
        return model.predict(ds.image(i)) == ds.labels[i] ? 1 : 0;
    });
    std::size_t correct = 0;
    for (int h : hits) {
        correct += static_cast<std::size_t>(h);
    }
    return static_cast<double>(correct) / static_cast<double>(ds.size());
}

/// Batch hook that may rewrite inputs before the gradient step.
struct IdentityBatch {
    template <class M>
    void operator()(const M &, std::vector<Sample> &, std::vector<std::vector<double>> &) const {}
};

/**
 * @brief Trains `model` in place with mini-batch Adam.
 *
 * Examples are reshuffled every epoch from `config.seed`. `transform` sees
 * each batch (and may redirect Sample::x into `storage`) before the
 * gradient is taken against the current parameters.
 */
template <TrainableClassifier M, class Transform = IdentityBatch>
TrainHistory train_model(M &model, const Dataset &train, const Dataset *test,
                         const TrainConfig &config, Transform &&transform = {}) {
    if (train.empty()) {
        throw DataError("training set is empty");
    }
    if (config.batch_size == 0) {
        throw ConfigurationError("batch_size must be positive");
    }
    AdamState adam(model.parameters().size(), config.adam);
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    TrainHistory history;
    std::vector<Sample> batch;
    std::vector<std::vector<double>> storage;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            batch.clear();
            storage.clear();
            for (std::size_t k = start; k < end; ++k) {
                batch.push_back(train.sample(order[k]));
            }
            transform(std::as_const(model), batch, storage);
            const BatchGradient g = model.batch_loss_and_grads(batch);
            if (!std::isfinite(g.loss)) {
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) +
                                    ", batch starting at " + std::to_string(start) +
                                    " (lr " + std::to_string(config.adam.lr) + ")");
            }
            for (double v : g.params) {
                if (!std::isfinite(v)) {
                    throw TrainingError("non-finite gradient at epoch " + std::to_string(epoch) +
                                        ", batch starting at " + std::to_string(start));
                }
            }
            adam_step(model.parameters(), g.params, adam);
            loss_sum += g.loss;
            ++batches;
        }
        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.loss = loss_sum / static_cast<double>(batches);
        rec.train_accuracy = evaluate_accuracy(model, train);
        if (test != nullptr && !test->empty()) {
            rec.test_accuracy = evaluate_accuracy(model, *test);
        }
        history.epochs.push_back(rec);
    }
    return history;
}

inline TrainHistory train_classical(ClassicalModel &model, const Dataset &train,
                                    const TrainConfig &config, const Dataset *test = nullptr) {
    return train_model(model, train, test, config);
}

} // namespace qrobust
