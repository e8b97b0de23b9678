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
 * Dataset preparation and model acquisition (load a checkpoint or train).
 */
#pragma once

#include "qrobust/checkpoint.hpp"
#include "qrobust/data.hpp"
#include "qrobust/harness/config.hpp"
#include "qrobust/training.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qrobust::harness {

struct ExperimentData {
    Dataset train;
    Dataset test;
    Dataset rest; ///< held out from both splits; detection pools come from here
    Dataset eval; ///< seeded subset of `test` used for attack sets
};

inline Dataset load_source_dataset(const ExperimentConfig &c) {
    const auto &d = c.dataset;
    Dataset ds;
    if (d.source == "synthetic") {
        const std::size_t k = d.classes.empty() ? d.source_classes : d.classes.size();
        return synth_blobs(k, d.synth_per_class, d.width, d.height, c.seeds.synth);
    }
    if (d.source == "cache") {
        ds = load_dataset(d.cache);
    } else {
        if (d.images.empty() || d.labels.empty()) {
            throw ConfigurationError("dataset.images and dataset.labels are required for idx");
        }
        ds = load_idx(d.images, d.labels, d.source_classes);
    }
    if (!d.classes.empty()) {
        for (auto k : d.classes) {
            if (k >= ds.class_count) {
                throw ConfigurationError("dataset.classes lists " + std::to_string(k) +
                                         " but the source has " +
                                         std::to_string(ds.class_count) + " classes");
            }
        }
        ds = select_classes(ds, d.classes);
    }
    if (ds.width != d.width || ds.height != d.height) {
        ds = downscale(ds, d.width, d.height);
    }
    return ds;
}

inline ExperimentData prepare_data(const ExperimentConfig &c) {
    const Dataset all = load_source_dataset(c);
    auto split = split_dataset(all, c.dataset.n_train, c.dataset.n_test, c.seeds.split);
    ExperimentData data{std::move(split.train), std::move(split.test), std::move(split.rest), {}};
    data.eval = sample_subset(data.test, c.dataset.eval_size, c.seeds.eval);
    data.eval.split = "eval";
    return data;
}

inline std::size_t model_classes(const AnyModel &m) {
    return std::visit([](const auto &x) { return x.num_classes(); }, m);
}

inline bool is_quantum(const AnyModel &m) { return std::holds_alternative<QvcModel>(m); }

struct NamedModel {
    std::string id;
    AnyModel model;
    TrainHistory history;  ///< empty when loaded from a checkpoint
    std::string origin;    ///< "trained" or the checkpoint path
};

inline AnyModel build_model(const ModelSpec &spec, const Dataset &shape, std::uint64_t seed) {
    const std::size_t k = shape.class_count;
    if (spec.family == "qvc") {
        if (shape.pixel_count() > (std::size_t{1} << spec.qubits)) {
            throw ConfigurationError("model '" + spec.id + "': " + std::to_string(spec.qubits) +
                                     " qubits cannot amplitude-encode " +
                                     std::to_string(shape.pixel_count()) + " pixels");
        }
        return QvcModel(spec.qubits, spec.layers, k, seed, spec.temperature);
    }
    if (spec.family == "convnet") {
        return ClassicalModel(convnet_spec(shape.width, shape.height, k), seed);
    }
    if (spec.family == "mlp") {
        return ClassicalModel(mlp_spec(shape.width, shape.height, k), seed);
    }
    throw ConfigurationError("unknown model family '" + spec.family + "'");
}

inline TrainConfig train_config_for(const ModelSpec &spec, std::uint64_t shuffle_seed) {
    TrainConfig t;
    t.epochs = spec.epochs;
    t.batch_size = spec.batch_size;
    t.adam.lr = spec.lr;
    t.seed = shuffle_seed;
    return t;
}

/// Ensures a loaded checkpoint matches the declared spec and data shape.
inline void check_loaded(const ModelSpec &spec, const AnyModel &m, const Dataset &shape) {
    auto fail = [&](const std::string &why) {
        throw ConfigurationError("checkpoint for '" + spec.id + "' " + why);
    };
    if (model_classes(m) != shape.class_count) {
        fail("has " + std::to_string(model_classes(m)) + " classes, dataset has " +
             std::to_string(shape.class_count));
    }
    if (const auto *q = std::get_if<QvcModel>(&m)) {
        if (spec.family != "qvc" || q->num_qubits() != spec.qubits ||
            q->num_layers() != spec.layers) {
            fail("does not match the declared qvc shape");
        }
        return;
    }
    const auto &c = std::get<ClassicalModel>(m);
    const auto want = spec.family == "convnet" ? convnet_spec(shape.width, shape.height, shape.class_count)
                                               : mlp_spec(shape.width, shape.height, shape.class_count);
    if (spec.quantum() || !(c.spec() == want)) {
        fail("does not match the declared " + spec.family + " shape");
    }
}

/**
 * @brief Loads `spec.checkpoint` when set, otherwise trains from scratch.
 *
 * A configured checkpoint that does not exist is a configuration error,
 * never a silent retrain.
 */
inline NamedModel obtain_model(const ModelSpec &spec, const ExperimentConfig &c,
                               const ExperimentData &data) {
    if (!spec.checkpoint.empty()) {
        if (!std::filesystem::exists(spec.checkpoint)) {
            throw ConfigurationError("missing checkpoint '" + spec.checkpoint + "' for model '" +
                                     spec.id + "'");
        }
        AnyModel m = load_checkpoint(spec.checkpoint);
        check_loaded(spec, m, data.train);
        return {spec.id, std::move(m), {}, spec.checkpoint};
    }
    NamedModel out{spec.id, build_model(spec, data.train, c.seeds.model_init.at(spec.id)), {},
                   "trained"};
    const auto tc = train_config_for(spec, c.seeds.model_train.at(spec.id));
    out.history = std::visit(
        [&](auto &m) { return train_model(m, data.train, &data.test, tc); }, out.model);
    return out;
}

template <class F>
decltype(auto) visit_model(const NamedModel &m, F &&f) {
    return std::visit(std::forward<F>(f), m.model);
}

inline std::size_t predict(const NamedModel &m, std::span<const double> x) {
    return visit_model(m, [&](const auto &model) { return model.predict(x); });
}

inline double accuracy(const NamedModel &m, const Dataset &ds) {
    return visit_model(m, [&](const auto &model) { return evaluate_accuracy(model, ds); });
}

} // namespace qrobust::harness
