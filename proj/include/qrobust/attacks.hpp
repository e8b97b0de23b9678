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
 * White-box l-infinity attacks (FGSM, PGD) in pixel space against any
 * DifferentiableClassifier, plus attack-set persistence for replay.
 */
#pragma once

#include "qrobust/binary_io.hpp"
#include "qrobust/data.hpp"
#include "qrobust/error.hpp"
#include "qrobust/model.hpp"
#include "qrobust/optim.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qrobust {

enum class AttackKind { FGSM, PGD };

inline std::string attack_kind_name(AttackKind k) { return k == AttackKind::FGSM ? "fgsm" : "pgd"; }

inline AttackKind parse_attack_kind(const std::string &s) {
    if (s == "fgsm") {
        return AttackKind::FGSM;
    }
    if (s == "pgd") {
        return AttackKind::PGD;
    }
    throw ConfigurationError("unknown attack kind '" + s + "'");
}

struct AttackConfig {
    AttackKind kind = AttackKind::PGD;
    double epsilon = 0.0;
    std::size_t steps = 1;
    double step_size = 0.0;
    bool random_start = false;
    std::uint64_t seed = 0;

    static AttackConfig fgsm(double epsilon) {
        return {AttackKind::FGSM, epsilon, 1, epsilon, false, 0};
    }

    /// Evaluation default: alpha = 2.5 * epsilon / steps.
    static AttackConfig pgd(double epsilon, std::size_t steps = 20, bool random_start = false,
                            std::uint64_t seed = 0) {
        return {AttackKind::PGD, epsilon, steps, 2.5 * epsilon / static_cast<double>(steps),
                random_start, seed};
    }

    void validate() const {
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
            throw ConfigurationError("attack epsilon must lie in [0, 1]");
        }
        if (kind == AttackKind::PGD) {
            if (steps == 0) {
                throw ConfigurationError("PGD needs at least one step");
            }
            if (!(step_size > 0.0) && epsilon > 0.0) {
                throw ConfigurationError("PGD step_size must be positive");
            }
        }
    }

    /// Set when the schedule cannot reach the budget boundary.
    [[nodiscard]] std::optional<std::string> warning() const {
        if (kind == AttackKind::PGD &&
            static_cast<double>(steps) * step_size < epsilon) {
            return "PGD steps*step_size < epsilon; the budget boundary is unreachable";
        }
        return std::nullopt;
    }

    friend bool operator==(const AttackConfig &, const AttackConfig &) = default;
};

struct AdversarialExample {
    std::vector<double> original;
    std::vector<double> perturbed;
    std::vector<double> delta; ///< perturbed - original
    std::string source_model;
    AttackConfig config;
    std::size_t label = 0;
    std::size_t original_prediction = 0;
    std::size_t adversarial_prediction = 0;
    std::vector<double> loss_trace; ///< loss at each PGD iterate, final included
};

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

namespace detail {

template <DifferentiableClassifier M>
AdversarialExample finish(const M &model, std::span<const double> x, std::size_t label,
                          std::vector<double> perturbed, const AttackConfig &config,
                          const std::string &source, std::vector<double> trace) {
    AdversarialExample ex;
    ex.original.assign(x.begin(), x.end());
    ex.delta.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        ex.delta[i] = perturbed[i] - x[i];
    }
    ex.perturbed = std::move(perturbed);
    ex.source_model = source;
    ex.config = config;
    ex.label = label;
    ex.original_prediction = model.predict(x);
    ex.adversarial_prediction = model.predict(ex.perturbed);
    ex.loss_trace = std::move(trace);
    return ex;
}

} // namespace detail

/// x' = clip_[0,1](x + eps * sign(grad_x L)), sign(0) = 0.
template <DifferentiableClassifier M>
AdversarialExample fgsm(const M &model, std::span<const double> x, std::size_t label,
                        double epsilon, const std::string &source = "") {
    const auto cfg = AttackConfig::fgsm(epsilon);
    cfg.validate();
    const InputGradient g = model.loss_and_input_grad(x, label);
    if (g.grad.size() != x.size()) {
        throw CapabilityError("model returned an input gradient of the wrong size");
    }
    std::vector<double> adv(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        adv[i] = std::clamp(x[i] + epsilon * sign_of(g.grad[i]), 0.0, 1.0);
    }
    return detail::finish(model, x, label, std::move(adv), cfg, source, {g.loss});
}

/**
 * @brief Projected signed-gradient ascent on the cross-entropy.
 *
 * Iterates x <- Proj(x + alpha * sign(grad)) onto B_inf(x0, eps) intersected
 * with [0,1]^d and returns the final iterate.
 */
template <DifferentiableClassifier M>
AdversarialExample pgd(const M &model, std::span<const double> x, std::size_t label,
                       const AttackConfig &config, const std::string &source = "",
                       std::uint64_t example_stream = 0) {
    config.validate();
    const std::size_t d = x.size();
    std::vector<double> lo(d), hi(d), cur(x.begin(), x.end());
    for (std::size_t i = 0; i < d; ++i) {
        lo[i] = std::max(x[i] - config.epsilon, 0.0);
        hi[i] = std::min(x[i] + config.epsilon, 1.0);
    }
    if (config.random_start && config.epsilon > 0.0) {
        std::seed_seq seq{config.seed, example_stream};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> u(-config.epsilon, config.epsilon);
        for (std::size_t i = 0; i < d; ++i) {
            cur[i] = std::clamp(x[i] + u(rng), lo[i], hi[i]);
        }
    }
    std::vector<double> trace;
    trace.reserve(config.steps + 1);
    for (std::size_t step = 0; step < config.steps; ++step) {
        const InputGradient g = model.loss_and_input_grad(cur, label);
        if (g.grad.size() != d) {
            throw CapabilityError("model returned an input gradient of the wrong size");
        }
        trace.push_back(g.loss);
        for (std::size_t i = 0; i < d; ++i) {
            cur[i] = std::clamp(cur[i] + config.step_size * sign_of(g.grad[i]), lo[i], hi[i]);
        }
    }
    trace.push_back(cross_entropy(model.probabilities(cur), label));
    return detail::finish(model, x, label, std::move(cur), config, source, std::move(trace));
}

template <DifferentiableClassifier M>
AdversarialExample run_attack(const M &model, std::span<const double> x, std::size_t label,
                              const AttackConfig &config, const std::string &source = "",
                              std::uint64_t example_stream = 0) {
    if (config.kind == AttackKind::FGSM) {
        auto ex = fgsm(model, x, label, config.epsilon, source);
        ex.config = config;
        return ex;
    }
    return pgd(model, x, label, config, source, example_stream);
}

struct AttackFailure {
    std::size_t index;
    std::string message;
};

struct AttackSummary {
    double epsilon = 0.0;
    std::size_t n_examples = 0;
    double clean_accuracy = 0.0;
    double accuracy = 0.0; ///< attacked-model accuracy on the perturbed images
    std::vector<AttackFailure> failures;
};

struct AttackSet {
    std::string source_model;
    AttackConfig config;
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<AdversarialExample> examples;
    AttackSummary summary;
};

/// One adversarial example per input; failures are recorded and skipped.
template <DifferentiableClassifier M>
AttackSet attack_batch(const M &model, const Dataset &slice, const AttackConfig &config,
                       const std::string &source = "") {
    if (slice.empty()) {
        throw DataError("attack_batch needs a nonempty slice");
    }
    config.validate();
    struct Outcome {
        std::optional<AdversarialExample> ex;
        std::string error;
    };
    auto outcomes = parallel_map(slice.size(), [&](std::size_t i) {
        try {
            return Outcome{run_attack(model, slice.image(i), slice.labels[i], config, source, i),
                           {}};
        } catch (const Error &e) {
            return Outcome{std::nullopt, e.what()};
        }
    });
    AttackSet set;
    set.source_model = source;
    set.config = config;
    set.width = slice.width;
    set.height = slice.height;
    std::size_t clean_hits = 0, adv_hits = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].ex) {
            set.summary.failures.push_back({i, outcomes[i].error});
            continue;
        }
        auto &ex = *outcomes[i].ex;
        clean_hits += ex.original_prediction == ex.label;
        adv_hits += ex.adversarial_prediction == ex.label;
        set.examples.push_back(std::move(ex));
    }
    set.summary.epsilon = config.epsilon;
    set.summary.n_examples = set.examples.size();
    if (!set.examples.empty()) {
        const double n = static_cast<double>(set.examples.size());
        set.summary.clean_accuracy = static_cast<double>(clean_hits) / n;
        set.summary.accuracy = static_cast<double>(adv_hits) / n;
    }
    return set;
}

/// Accuracy of `model` on the perturbed images of a stored set.
template <Classifier M>
double replay_accuracy(const M &model, const AttackSet &set) {
    if (set.examples.empty()) {
        throw DataError("cannot replay an empty attack set");
    }
    const auto hits = parallel_map(set.examples.size(), [&](std::size_t i) {
        return model.predict(set.examples[i].perturbed) == set.examples[i].label ? 1 : 0;
    });
    std::size_t n = 0;
    for (int h : hits) {
        n += static_cast<std::size_t>(h);
    }
    return static_cast<double>(n) / static_cast<double>(set.examples.size());
}

/// Perturbed images as a Dataset carrying the true labels.
inline Dataset perturbed_dataset(const AttackSet &set, std::size_t class_count) {
    Dataset ds;
    ds.width = set.width;
    ds.height = set.height;
    ds.class_count = class_count;
    ds.split = "attacked";
    for (const auto &ex : set.examples) {
        ds.push_back(ex.perturbed, ex.label);
    }
    return ds;
}

inline nlohmann::json attack_config_json(const AttackConfig &c) {
    return {{"kind", attack_kind_name(c.kind)}, {"epsilon", c.epsilon},
            {"steps", c.steps},                 {"step_size", c.step_size},
            {"random_start", c.random_start},   {"seed", c.seed}};
}

inline AttackConfig attack_config_from_json(const nlohmann::json &j) {
    AttackConfig c;
    c.kind = parse_attack_kind(j.at("kind").get<std::string>());
    c.epsilon = j.at("epsilon").get<double>();
    c.steps = j.at("steps").get<std::size_t>();
    c.step_size = j.at("step_size").get<double>();
    c.random_start = j.at("random_start").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

/**
 * @brief Persists an attack set as <dir>/manifest.json + <dir>/examples.bin.
 *
 * examples.bin holds, per example and little-endian: u64 label,
 * u64 original prediction, u64 adversarial prediction, then width*height
 * f64 original pixels and width*height f64 perturbed pixels.
 */
inline void save_attack_set(const AttackSet &set, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest = {
        {"format", "qrobust-attack-set"},
        {"version", 1},
        {"source_model", set.source_model},
        {"config", attack_config_json(set.config)},
        {"seed", set.config.seed},
        {"width", set.width},
        {"height", set.height},
        {"n_examples", set.examples.size()},
        {"clean_accuracy", set.summary.clean_accuracy},
        {"accuracy", set.summary.accuracy},
        {"failures", set.summary.failures.size()},
    };
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
    std::vector<std::uint8_t> bin;
    for (const auto &ex : set.examples) {
        io::put_u64_le(bin, ex.label);
        io::put_u64_le(bin, ex.original_prediction);
        io::put_u64_le(bin, ex.adversarial_prediction);
        for (double v : ex.original) {
            io::put_f64_le(bin, v);
        }
        for (double v : ex.perturbed) {
            io::put_f64_le(bin, v);
        }
    }
    io::write_file_bytes((dir / "examples.bin").string(), bin);
}

inline AttackSet load_attack_set(const std::filesystem::path &dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) {
        throw IoError("missing attack manifest in '" + dir.string() + "'");
    }
    nlohmann::json m;
    try {
        in >> m;
    } catch (const nlohmann::json::exception &e) {
        throw FormatError("attack manifest: " + std::string(e.what()));
    }
    if (m.value("format", "") != "qrobust-attack-set" || m.value("version", 0) != 1) {
        throw FormatError("'" + dir.string() + "' is not a version-1 attack set");
    }
    AttackSet set;
    set.source_model = m.at("source_model").get<std::string>();
    set.config = attack_config_from_json(m.at("config"));
    set.width = m.at("width").get<std::size_t>();
    set.height = m.at("height").get<std::size_t>();
    const std::size_t n = m.at("n_examples").get<std::size_t>();
    set.summary.epsilon = set.config.epsilon;
    set.summary.n_examples = n;
    set.summary.clean_accuracy = m.at("clean_accuracy").get<double>();
    set.summary.accuracy = m.at("accuracy").get<double>();
    const auto bin = io::read_file_bytes((dir / "examples.bin").string());
    const std::size_t px = set.width * set.height;
    const std::size_t rec = 24 + 16 * px;
    if (bin.size() != n * rec) {
        throw FormatError("examples.bin has " + std::to_string(bin.size()) + " bytes, expected " +
                          std::to_string(n * rec));
    }
    std::size_t off = 0;
    for (std::size_t k = 0; k < n; ++k) {
        AdversarialExample ex;
        ex.source_model = set.source_model;
        ex.config = set.config;
        ex.label = io::get_u64_le(bin, off);
        ex.original_prediction = io::get_u64_le(bin, off + 8);
        ex.adversarial_prediction = io::get_u64_le(bin, off + 16);
        off += 24;
        ex.original.resize(px);
        ex.perturbed.resize(px);
        ex.delta.resize(px);
        for (std::size_t i = 0; i < px; ++i, off += 8) {
            ex.original[i] = io::get_f64_le(bin, off);
        }
        for (std::size_t i = 0; i < px; ++i, off += 8) {
            ex.perturbed[i] = io::get_f64_le(bin, off);
            ex.delta[i] = ex.perturbed[i] - ex.original[i];
        }
        set.examples.push_back(std::move(ex));
    }
    return set;
}

} // namespace qrobust
