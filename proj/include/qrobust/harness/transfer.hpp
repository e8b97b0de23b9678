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
 * Cross-model transfer: white-box sets on a source, replayed on every target.
 */
#pragma once

#include "qrobust/attacks.hpp"
#include "qrobust/harness/models.hpp"
#include "qrobust/harness/report.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace qrobust::harness {

struct TransferReport {
    std::string source;
    std::vector<std::string> targets; ///< includes the source (its row is the white-box curve)
    std::vector<double> epsilons;
    std::vector<std::vector<double>> accuracy; ///< [target][epsilon]
    std::vector<double> clean;                 ///< per target, on the same images
    std::vector<double> recorded;              ///< white-box accuracy recorded at generation
    std::size_t n_examples = 0;
    std::uint64_t seed = 0;
};

/// Attack-set seed for one (source, epsilon) cell.
inline std::uint64_t attack_seed(std::uint64_t base, const std::string &source, double epsilon) {
    return derive_seed(base, "attack:" + source + ":" + format_number(epsilon));
}

inline AttackSet generate_attack_set(const NamedModel &source, const Dataset &eval,
                                     const AttackConfig &config) {
    auto set = visit_model(source, [&](const auto &m) {
        return attack_batch(m, eval, config, source.id);
    });
    if (!set.summary.failures.empty()) {
        throw DegenerateInputError("attack on '" + source.id + "' failed for example " +
                                   std::to_string(set.summary.failures.front().index) + ": " +
                                   set.summary.failures.front().message);
    }
    return set;
}

inline std::filesystem::path attack_set_dir(const std::filesystem::path &root,
                                            const std::string &source, double epsilon) {
    return root / source / ("eps_" + format_number(epsilon));
}

/**
 * @brief Runs the transfer protocol for one source model.
 *
 * When `save_root` is nonempty every attack set is written below it, so the
 * same perturbed images can be replayed later.
 */
inline TransferReport run_transfer(const NamedModel &source, const std::vector<NamedModel> &targets,
                                   const Dataset &eval, const AttackSpec &attack,
                                   std::uint64_t seed,
                                   const std::filesystem::path &save_root = {}) {
    if (targets.empty()) {
        throw ConfigurationError("transfer needs at least one target model");
    }
    TransferReport r;
    r.source = source.id;
    r.epsilons = attack.epsilon_grid;
    r.seed = seed;
    r.n_examples = eval.size();
    for (const auto &t : targets) {
        if (model_classes(t.model) != model_classes(source.model)) {
            throw ConfigurationError("target '" + t.id + "' has a different label space from '" +
                                     source.id + "'");
        }
        r.targets.push_back(t.id);
        r.clean.push_back(accuracy(t, eval));
    }
    r.accuracy.assign(targets.size(), std::vector<double>(r.epsilons.size(), 0.0));
    for (std::size_t e = 0; e < r.epsilons.size(); ++e) {
        const double eps = r.epsilons[e];
        const auto set =
            generate_attack_set(source, eval, attack.at(eps, attack_seed(seed, source.id, eps)));
        r.recorded.push_back(set.summary.accuracy);
        if (!save_root.empty()) {
            save_attack_set(set, attack_set_dir(save_root, source.id, eps));
        }
        for (std::size_t t = 0; t < targets.size(); ++t) {
            r.accuracy[t][e] = visit_model(
                targets[t], [&](const auto &m) { return replay_accuracy(m, set); });
        }
    }
    return r;
}

/// Fixed-column table: clean rows carry epsilon "clean".
inline CsvTable transfer_table(const TransferReport &r, const std::string &hash) {
    CsvTable t({"epsilon", "target_id", "accuracy", "n_examples", "seed", "config_hash"});
    for (std::size_t i = 0; i < r.targets.size(); ++i) {
        t.row({"clean", r.targets[i], num(r.clean[i]), num(r.n_examples), num(r.seed), hash});
        for (std::size_t e = 0; e < r.epsilons.size(); ++e) {
            t.row({num(r.epsilons[e]), r.targets[i], num(r.accuracy[i][e]), num(r.n_examples),
                   num(r.seed), hash});
        }
    }
    return t;
}

inline std::size_t index_of(const std::vector<std::string> &ids, const std::string &id) {
    const auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) {
        throw ConfigurationError("model '" + id + "' missing from transfer report");
    }
    return static_cast<std::size_t>(it - ids.begin());
}

/**
 * @brief Classical/quantum transfer asymmetry per epsilon.
 *
 * drop(a -> b) is b's clean accuracy minus its accuracy on a's attack set;
 * asymmetry = drop(quantum -> classical) - drop(classical -> quantum).
 */
inline CsvTable asymmetry_table(const std::vector<TransferReport> &reports,
                                const std::vector<NamedModel> &models, const std::string &hash) {
    CsvTable t({"epsilon", "classical_id", "quantum_id", "drop_classical_to_quantum",
                "drop_quantum_to_classical", "asymmetry", "n_examples", "seed", "config_hash"});
    auto report_for = [&](const std::string &id) -> const TransferReport * {
        for (const auto &r : reports) {
            if (r.source == id) {
                return &r;
            }
        }
        return nullptr;
    };
    for (const auto &c : models) {
        if (is_quantum(c.model)) {
            continue;
        }
        for (const auto &q : models) {
            if (!is_quantum(q.model)) {
                continue;
            }
            const auto *rc = report_for(c.id);
            const auto *rq = report_for(q.id);
            if (rc == nullptr || rq == nullptr) {
                continue;
            }
            const std::size_t qi = index_of(rc->targets, q.id);
            const std::size_t ci = index_of(rq->targets, c.id);
            for (std::size_t e = 0; e < rc->epsilons.size(); ++e) {
                const double c2q = rc->clean[qi] - rc->accuracy[qi][e];
                const double q2c = rq->clean[ci] - rq->accuracy[ci][e];
                t.row({num(rc->epsilons[e]), c.id, q.id, num(c2q), num(q2c), num(q2c - c2q),
                       num(rc->n_examples), num(rc->seed), hash});
            }
        }
    }
    return t;
}

} // namespace qrobust::harness
