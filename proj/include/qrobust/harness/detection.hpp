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
 * Disagreement detector: an input is flagged when the classical and
 * quantum predictions differ.
 */
#pragma once

#include "qrobust/attacks.hpp"
#include "qrobust/harness/models.hpp"
#include "qrobust/harness/report.hpp"

#include <random>
#include <string>
#include <vector>

namespace qrobust::harness {

struct DetectionReport {
    std::string classical_id;
    std::string quantum_id;
    std::size_t clean_pool = 0;
    std::size_t attacked_pool = 0;
    std::size_t true_positives = 0;  ///< flagged, attacked
    std::size_t false_positives = 0; ///< flagged, clean
    std::size_t true_negatives = 0;  ///< not flagged, clean
    std::size_t false_negatives = 0; ///< not flagged, attacked

    [[nodiscard]] double tp_rate() const {
        return attacked_pool ? static_cast<double>(true_positives) / attacked_pool : 0.0;
    }
    [[nodiscard]] double fp_rate() const {
        return clean_pool ? static_cast<double>(false_positives) / clean_pool : 0.0;
    }
};

inline std::size_t count_disagreements(const NamedModel &a, const NamedModel &b,
                                       const Dataset &pool) {
    const auto flags = parallel_map(pool.size(), [&](std::size_t i) {
        return predict(a, pool.image(i)) != predict(b, pool.image(i)) ? 1 : 0;
    });
    std::size_t n = 0;
    for (int f : flags) {
        n += static_cast<std::size_t>(f);
    }
    return n;
}

inline DetectionReport run_detection(const NamedModel &classical, const NamedModel &quantum,
                                     const Dataset &clean_pool, const Dataset &attacked_pool) {
    const std::size_t k = model_classes(classical.model);
    if (model_classes(quantum.model) != k) {
        throw ConfigurationError("detector models '" + classical.id + "' and '" + quantum.id +
                                 "' have different label spaces");
    }
    if (clean_pool.class_count != k || attacked_pool.class_count != k) {
        throw ConfigurationError("detection pools do not match the models' label space");
    }
    DetectionReport r;
    r.classical_id = classical.id;
    r.quantum_id = quantum.id;
    r.clean_pool = clean_pool.size();
    r.attacked_pool = attacked_pool.size();
    r.false_positives = count_disagreements(classical, quantum, clean_pool);
    r.true_negatives = r.clean_pool - r.false_positives;
    r.true_positives = count_disagreements(classical, quantum, attacked_pool);
    r.false_negatives = r.attacked_pool - r.true_positives;
    return r;
}

/**
 * @brief Attacks every image of `pool` against `source`.
 *
 * Each example draws its (kind, epsilon) uniformly from the given lists with
 * its own seeded stream; PGD uses the default 20-step schedule.
 */
inline Dataset build_attacked_pool(const NamedModel &source, const Dataset &pool,
                                   const std::vector<AttackKind> &kinds,
                                   const std::vector<double> &epsilons, std::uint64_t seed) {
    if (kinds.empty() || epsilons.empty()) {
        throw ConfigurationError("attacked pool needs attack kinds and epsilons");
    }
    auto perturbed = parallel_map(pool.size(), [&](std::size_t i) {
        std::seed_seq seq{seed, static_cast<std::uint64_t>(i)};
        std::mt19937_64 rng(seq);
        const auto cell = std::uniform_int_distribution<std::size_t>(
            0, kinds.size() * epsilons.size() - 1)(rng);
        const AttackKind kind = kinds[cell / epsilons.size()];
        const double eps = epsilons[cell % epsilons.size()];
        const AttackConfig config =
            kind == AttackKind::FGSM ? AttackConfig::fgsm(eps) : AttackConfig::pgd(eps);
        return visit_model(source, [&](const auto &m) {
            return run_attack(m, pool.image(i), pool.labels[i], config, source.id, i).perturbed;
        });
    });
    Dataset out;
    out.width = pool.width;
    out.height = pool.height;
    out.class_count = pool.class_count;
    out.split = "attacked";
    for (std::size_t i = 0; i < pool.size(); ++i) {
        out.push_back(perturbed[i], pool.labels[i]);
    }
    return out;
}

inline CsvTable detection_table(const DetectionReport &r, std::uint64_t seed,
                                const std::string &hash) {
    CsvTable t({"classical_id", "quantum_id", "clean_pool", "attacked_pool", "true_positives",
                "false_positives", "true_negatives", "false_negatives", "tp_rate", "fp_rate",
                "seed", "config_hash"});
    t.row({r.classical_id, r.quantum_id, num(r.clean_pool), num(r.attacked_pool),
           num(r.true_positives), num(r.false_positives), num(r.true_negatives),
           num(r.false_negatives), num(r.tp_rate()), num(r.fp_rate()), num(seed), hash});
    return t;
}

} // namespace qrobust::harness
