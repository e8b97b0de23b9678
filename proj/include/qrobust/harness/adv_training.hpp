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
 * Adversarial training: part of every batch is replaced by PGD examples
 * crafted against the current parameters.
 */
#pragma once

#include "qrobust/attacks.hpp"
#include "qrobust/harness/models.hpp"
#include "qrobust/training.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace qrobust::harness {

struct AdvTrainOptions {
    double epsilon = 0.1;
    std::size_t steps = 3;
    double mix = 0.5; ///< fraction of each batch that is adversarial
};

/**
 * @brief Batch transform for train_model.
 *
 * The last round(mix * b) examples of a batch of size b are replaced by
 * their PGD counterparts (alpha = 2.5 eps / steps, no random start).
 */
class AdversarialBatch {
  public:
    explicit AdversarialBatch(AdvTrainOptions opts) : opts_(opts) {}

    template <DifferentiableClassifier M>
    void operator()(const M &model, std::vector<Sample> &batch,
                    std::vector<std::vector<double>> &storage) const {
        const auto n_adv = static_cast<std::size_t>(
            std::llround(opts_.mix * static_cast<double>(batch.size())));
        if (n_adv == 0) {
            return;
        }
        const std::size_t first = batch.size() - n_adv;
        const AttackConfig config = AttackConfig::pgd(opts_.epsilon, opts_.steps);
        storage.resize(n_adv);
        for (std::size_t k = 0; k < n_adv; ++k) {
            auto &s = batch[first + k];
            storage[k] = pgd(model, s.x, s.label, config).perturbed;
        }
        for (std::size_t k = 0; k < n_adv; ++k) {
            batch[first + k].x = storage[k];
        }
    }

  private:
    AdvTrainOptions opts_;
};

/// Variant id following the superscript convention, e.g. "convnet^0.1".
inline std::string adv_variant_id(const std::string &base, double epsilon) {
    return base + "^" + format_number(epsilon);
}

/// Trains a fresh copy of `spec` with adversarial batches at `opts.epsilon`.
inline NamedModel run_adv_training(const ModelSpec &spec, const ExperimentConfig &c,
                                   const ExperimentData &data, const AdvTrainOptions &opts) {
    NamedModel out{adv_variant_id(spec.id, opts.epsilon),
                   build_model(spec, data.train, c.seeds.model_init.at(spec.id)), {},
                   "advtrained"};
    const auto tc = train_config_for(spec, c.seeds.model_train.at(spec.id));
    out.history = std::visit(
        [&](auto &m) {
            return train_model(m, data.train, &data.test, tc, AdversarialBatch(opts));
        },
        out.model);
    return out;
}

} // namespace qrobust::harness
