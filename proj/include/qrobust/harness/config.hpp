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
 * Experiment configuration: JSON schema, flag overrides, seeds and hashing.
 *
 * A config is resolved once (defaults filled, relative paths anchored at the
 * config file, seeds derived) and its canonical JSON dump is hashed. The
 * output directory is not part of the hash, so reruns into fresh
 * directories stay comparable.
 */
#pragma once

#include "qrobust/attacks.hpp"
#include "qrobust/error.hpp"
#include "qrobust/noise.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace qrobust::harness {

/// Malformed config text or flags; the CLI maps it to the usage exit code.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed for a named pipeline step, derived from the base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view name) {
    std::uint64_t z = fnv1a64(name) ^ (base + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return (z ^ (z >> 31)) & 0x7fffffffffffffffULL; // fits a signed JSON integer
}

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

/// Shortest round-trip decimal form; stable across runs and locales.
inline std::string format_number(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_number(std::string_view s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        throw UsageError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

/// Comma-separated list such as "0,0.05,0.1".
inline std::vector<double> parse_number_list(std::string_view s) {
    std::vector<double> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(parse_number(s.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        s.remove_prefix(comma + 1);
    }
    return out;
}

struct DatasetSpec {
    std::string source = "idx"; ///< idx | cache | synthetic
    std::string images;         ///< IDX image file (idx)
    std::string labels;         ///< IDX label file (idx)
    std::string cache;          ///< dataset cache file (cache)
    std::size_t source_classes = 10;
    std::vector<std::size_t> classes{0, 1, 2, 3}; ///< kept and relabelled 0..k-1; empty keeps all
    std::size_t width = 8;
    std::size_t height = 8;
    std::size_t synth_per_class = 200;
    std::size_t n_train = 500;
    std::size_t n_test = 250;
    std::size_t eval_size = 250; ///< seeded subset of the test split used for attacks
};

struct ModelSpec {
    std::string id;
    std::string family; ///< qvc | convnet | mlp
    std::size_t qubits = 6;
    std::size_t layers = 20;
    double temperature = 1.0;
    std::size_t epochs = 30;
    std::size_t batch_size = 16;
    double lr = 0.0; ///< 0 picks the family default
    std::string checkpoint; ///< load instead of training; must exist when set

    [[nodiscard]] bool quantum() const { return family == "qvc"; }
};

struct AttackSpec {
    AttackKind kind = AttackKind::PGD;
    std::size_t steps = 20;
    double step_scale = 2.5; ///< step size = step_scale * epsilon / steps
    bool random_start = false;
    std::vector<double> epsilon_grid{0.0, 0.05, 0.1, 0.2, 0.3};

    [[nodiscard]] AttackConfig at(double epsilon, std::uint64_t seed) const {
        if (kind == AttackKind::FGSM) {
            return AttackConfig::fgsm(epsilon);
        }
        AttackConfig c = AttackConfig::pgd(epsilon, steps, random_start, seed);
        c.step_size = step_scale * epsilon / static_cast<double>(steps);
        return c;
    }
};

struct AdvTrainSpec {
    std::string model;              ///< base model id
    std::vector<double> epsilons{0.0, 0.1};
    std::size_t steps = 3;
    double mix = 0.5;               ///< adversarial fraction of each batch
    std::string transfer_source;    ///< optional model whose attacks are replayed on each variant
};

struct NoiseSpec {
    std::string model;
    std::vector<NoiseKind> kinds{NoiseKind::Depolarizing, NoiseKind::AmplitudeDamping,
                                 NoiseKind::BitFlip, NoiseKind::GlobalDepolarizing};
    std::vector<double> strengths{0.0, 0.01, 0.05, 0.1};
    std::size_t trajectories = 20;
};

struct DetectSpec {
    std::string classical;
    std::string quantum;
    std::string attack_source; ///< defaults to the classical model
    std::size_t pool_size = 1000;
    std::vector<AttackKind> kinds{AttackKind::FGSM, AttackKind::PGD};
    std::vector<double> epsilons{0.05, 0.1, 0.2, 0.3};
};

struct ExportSpec {
    std::string model;
    double epsilon = 0.1;
    std::size_t count = 8;
};

/// Seeds for every randomized step, resolved from the base seed.
struct Seeds {
    std::uint64_t base = 0;
    std::uint64_t split = 0;
    std::uint64_t eval = 0;
    std::uint64_t attack = 0;
    std::uint64_t noise = 0;
    std::uint64_t detect = 0;
    std::uint64_t synth = 0;
    std::map<std::string, std::uint64_t> model_init;  ///< per model id
    std::map<std::string, std::uint64_t> model_train; ///< per model id (batch shuffling)
};

struct ExperimentConfig {
    DatasetSpec dataset;
    std::vector<ModelSpec> models;
    AttackSpec attack;
    AdvTrainSpec advtrain;
    NoiseSpec noise;
    DetectSpec detect;
    ExportSpec export_;
    Seeds seeds;
    nlohmann::json explicit_seeds = nlohmann::json::object(); ///< as written in the file
    std::string out_dir = "out";

    [[nodiscard]] const ModelSpec &model(const std::string &id) const {
        for (const auto &m : models) {
            if (m.id == id) {
                return m;
            }
        }
        throw ConfigurationError("unknown model id '" + id + "'");
    }
};

namespace detail {

inline void check_keys(const nlohmann::json &j, const std::string &where,
                       std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) {
        throw UsageError(where + ": expected an object");
    }
    for (const auto &[key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw UsageError(where + ": unknown key '" + key + "'");
        }
    }
}

template <class T>
void read(const nlohmann::json &j, const char *key, T &out, const std::string &where) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw UsageError(where + "." + key + ": wrong type");
    }
}

inline std::string anchor(const std::string &path, const std::filesystem::path &base) {
    if (path.empty() || std::filesystem::path(path).is_absolute()) {
        return path;
    }
    return (base / path).lexically_normal().string();
}

} // namespace detail

/// Checks semantic constraints; throws ConfigurationError.
inline void validate_config(const ExperimentConfig &c) {
    const auto &g = c.attack.epsilon_grid;
    if (g.empty()) {
        throw ConfigurationError("epsilon grid is empty");
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] >= 0.0 && g[i] <= 1.0)) {
            throw ConfigurationError("epsilon " + format_number(g[i]) + " outside [0, 1]");
        }
        if (i > 0 && !(g[i] > g[i - 1])) {
            throw ConfigurationError("epsilon grid must be strictly ascending");
        }
    }
    if (c.attack.steps == 0) {
        throw ConfigurationError("attack.steps must be positive");
    }
    std::set<std::string> ids;
    for (const auto &m : c.models) {
        if (m.id.empty() || m.id.find_first_of("/\\ ,") != std::string::npos) {
            throw ConfigurationError("model id '" + m.id + "' is empty or has separators");
        }
        if (!ids.insert(m.id).second) {
            throw ConfigurationError("duplicate model id '" + m.id + "'");
        }
        if (m.family != "qvc" && m.family != "convnet" && m.family != "mlp") {
            throw ConfigurationError("model '" + m.id + "': unknown family '" + m.family + "'");
        }
        if (m.batch_size == 0) {
            throw ConfigurationError("model '" + m.id + "': batch_size must be positive");
        }
    }
    const auto &d = c.dataset;
    if (d.source != "idx" && d.source != "cache" && d.source != "synthetic") {
        throw ConfigurationError("dataset.source must be idx, cache or synthetic");
    }
    if (d.eval_size > d.n_test) {
        throw ConfigurationError("dataset.eval_size exceeds n_test");
    }
    if (!(c.advtrain.mix >= 0.0 && c.advtrain.mix <= 1.0)) {
        throw ConfigurationError("advtrain.mix must lie in [0, 1]");
    }
    for (double e : c.advtrain.epsilons) {
        if (!(e >= 0.0 && e <= 1.0)) {
            throw ConfigurationError("advtrain epsilon outside [0, 1]");
        }
    }
    for (double s : c.noise.strengths) {
        if (!(s >= 0.0 && s <= 1.0)) {
            throw ConfigurationError("noise strength outside [0, 1]");
        }
    }
    if (c.noise.trajectories == 0) {
        throw ConfigurationError("noise.trajectories must be positive");
    }
    if (c.detect.kinds.empty() || c.detect.epsilons.empty()) {
        throw ConfigurationError("detect needs at least one attack kind and epsilon");
    }
}

/// Fills derived seeds; entries in `explicit_seeds` win.
inline void resolve_seeds(ExperimentConfig &c) {
    auto pick = [&](const std::string &name) -> std::uint64_t {
        if (c.explicit_seeds.contains(name)) {
            return c.explicit_seeds.at(name).get<std::uint64_t>();
        }
        return derive_seed(c.seeds.base, name);
    };
    c.seeds.split = pick("split");
    c.seeds.eval = pick("eval");
    c.seeds.attack = pick("attack");
    c.seeds.noise = pick("noise");
    c.seeds.detect = pick("detect");
    c.seeds.synth = pick("synth");
    c.seeds.model_init.clear();
    c.seeds.model_train.clear();
    for (const auto &m : c.models) {
        c.seeds.model_init[m.id] = pick("init:" + m.id);
        c.seeds.model_train[m.id] = pick("train:" + m.id);
    }
}

/**
 * @brief Parses a config document. Relative paths are anchored at `base_dir`.
 *
 * Unknown keys and type errors raise UsageError; semantic problems are left
 * to validate_config.
 */
inline ExperimentConfig parse_config(const nlohmann::json &j, const std::filesystem::path &base_dir) {
    using detail::read;
    ExperimentConfig c;
    detail::check_keys(j, "config",
                       {"seed", "seeds", "out", "dataset", "models", "attack", "advtrain", "noise",
                        "detect", "export"});
    read(j, "seed", c.seeds.base, "config");
    read(j, "out", c.out_dir, "config");
    if (j.contains("seeds")) {
        const auto &s = j.at("seeds");
        if (!s.is_object()) {
            throw UsageError("config.seeds: expected an object");
        }
        for (const auto &[k, v] : s.items()) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
                throw UsageError("config.seeds." + k + ": expected a non-negative integer");
            }
        }
        c.explicit_seeds = s;
    }
    if (j.contains("dataset")) {
        const auto &d = j.at("dataset");
        detail::check_keys(d, "dataset",
                           {"source", "images", "labels", "cache", "source_classes", "classes",
                            "width", "height", "synth_per_class", "n_train", "n_test",
                            "eval_size"});
        auto &o = c.dataset;
        read(d, "source", o.source, "dataset");
        read(d, "images", o.images, "dataset");
        read(d, "labels", o.labels, "dataset");
        read(d, "cache", o.cache, "dataset");
        read(d, "source_classes", o.source_classes, "dataset");
        read(d, "classes", o.classes, "dataset");
        read(d, "width", o.width, "dataset");
        read(d, "height", o.height, "dataset");
        read(d, "synth_per_class", o.synth_per_class, "dataset");
        read(d, "n_train", o.n_train, "dataset");
        read(d, "n_test", o.n_test, "dataset");
        read(d, "eval_size", o.eval_size, "dataset");
        o.images = detail::anchor(o.images, base_dir);
        o.labels = detail::anchor(o.labels, base_dir);
        o.cache = detail::anchor(o.cache, base_dir);
    }
    if (j.contains("models")) {
        if (!j.at("models").is_array()) {
            throw UsageError("config.models: expected an array");
        }
        for (const auto &m : j.at("models")) {
            detail::check_keys(m, "models[]",
                               {"id", "family", "qubits", "layers", "temperature", "epochs",
                                "batch_size", "lr", "checkpoint"});
            ModelSpec s;
            read(m, "id", s.id, "models[]");
            read(m, "family", s.family, "models[]");
            read(m, "qubits", s.qubits, "models[]");
            read(m, "layers", s.layers, "models[]");
            read(m, "temperature", s.temperature, "models[]");
            read(m, "epochs", s.epochs, "models[]");
            read(m, "batch_size", s.batch_size, "models[]");
            read(m, "lr", s.lr, "models[]");
            read(m, "checkpoint", s.checkpoint, "models[]");
            s.checkpoint = detail::anchor(s.checkpoint, base_dir);
            if (s.lr == 0.0) {
                s.lr = s.quantum() ? 0.01 : 1e-3;
            }
            c.models.push_back(std::move(s));
        }
    }
    if (j.contains("attack")) {
        const auto &a = j.at("attack");
        detail::check_keys(a, "attack",
                           {"kind", "steps", "step_scale", "random_start", "epsilon_grid"});
        std::string kind = attack_kind_name(c.attack.kind);
        read(a, "kind", kind, "attack");
        try {
            c.attack.kind = parse_attack_kind(kind);
        } catch (const ConfigurationError &e) {
            throw UsageError(std::string("attack.kind: ") + e.what());
        }
        read(a, "steps", c.attack.steps, "attack");
        read(a, "step_scale", c.attack.step_scale, "attack");
        read(a, "random_start", c.attack.random_start, "attack");
        read(a, "epsilon_grid", c.attack.epsilon_grid, "attack");
    }
    if (j.contains("advtrain")) {
        const auto &a = j.at("advtrain");
        detail::check_keys(a, "advtrain", {"model", "epsilons", "steps", "mix", "transfer_source"});
        read(a, "model", c.advtrain.model, "advtrain");
        read(a, "epsilons", c.advtrain.epsilons, "advtrain");
        read(a, "steps", c.advtrain.steps, "advtrain");
        read(a, "mix", c.advtrain.mix, "advtrain");
        read(a, "transfer_source", c.advtrain.transfer_source, "advtrain");
    }
    if (j.contains("noise")) {
        const auto &n = j.at("noise");
        detail::check_keys(n, "noise", {"model", "kinds", "strengths", "trajectories"});
        read(n, "model", c.noise.model, "noise");
        if (n.contains("kinds")) {
            std::vector<std::string> names;
            read(n, "kinds", names, "noise");
            c.noise.kinds.clear();
            for (const auto &s : names) {
                try {
                    c.noise.kinds.push_back(parse_noise_kind(s));
                } catch (const ConfigurationError &e) {
                    throw UsageError(std::string("noise.kinds: ") + e.what());
                }
            }
        }
        read(n, "strengths", c.noise.strengths, "noise");
        read(n, "trajectories", c.noise.trajectories, "noise");
    }
    if (j.contains("detect")) {
        const auto &d = j.at("detect");
        detail::check_keys(d, "detect",
                           {"classical", "quantum", "attack_source", "pool_size", "kinds",
                            "epsilons"});
        read(d, "classical", c.detect.classical, "detect");
        read(d, "quantum", c.detect.quantum, "detect");
        read(d, "attack_source", c.detect.attack_source, "detect");
        read(d, "pool_size", c.detect.pool_size, "detect");
        if (d.contains("kinds")) {
            std::vector<std::string> names;
            read(d, "kinds", names, "detect");
            c.detect.kinds.clear();
            for (const auto &s : names) {
                try {
                    c.detect.kinds.push_back(parse_attack_kind(s));
                } catch (const ConfigurationError &e) {
                    throw UsageError(std::string("detect.kinds: ") + e.what());
                }
            }
        }
        read(d, "epsilons", c.detect.epsilons, "detect");
    }
    if (j.contains("export")) {
        const auto &e = j.at("export");
        detail::check_keys(e, "export", {"model", "epsilon", "count"});
        read(e, "model", c.export_.model, "export");
        read(e, "epsilon", c.export_.epsilon, "export");
        read(e, "count", c.export_.count, "export");
    }
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error &e) {
        throw UsageError("malformed config '" + path.string() + "': " + e.what());
    }
    return parse_config(j, std::filesystem::absolute(path).parent_path());
}

/// Fully resolved config as canonical JSON (keys sorted, output directory excluded).
inline nlohmann::json canonical_json(const ExperimentConfig &c) {
    nlohmann::json j;
    const auto &d = c.dataset;
    j["dataset"] = {{"source", d.source},
                    {"images", d.images},
                    {"labels", d.labels},
                    {"cache", d.cache},
                    {"source_classes", d.source_classes},
                    {"classes", d.classes},
                    {"width", d.width},
                    {"height", d.height},
                    {"synth_per_class", d.synth_per_class},
                    {"n_train", d.n_train},
                    {"n_test", d.n_test},
                    {"eval_size", d.eval_size}};
    j["models"] = nlohmann::json::array();
    for (const auto &m : c.models) {
        j["models"].push_back({{"id", m.id},
                               {"family", m.family},
                               {"qubits", m.qubits},
                               {"layers", m.layers},
                               {"temperature", m.temperature},
                               {"epochs", m.epochs},
                               {"batch_size", m.batch_size},
                               {"lr", m.lr},
                               {"checkpoint", m.checkpoint}});
    }
    j["attack"] = {{"kind", attack_kind_name(c.attack.kind)},
                   {"steps", c.attack.steps},
                   {"step_scale", c.attack.step_scale},
                   {"random_start", c.attack.random_start},
                   {"epsilon_grid", c.attack.epsilon_grid}};
    j["advtrain"] = {{"model", c.advtrain.model},
                     {"epsilons", c.advtrain.epsilons},
                     {"steps", c.advtrain.steps},
                     {"mix", c.advtrain.mix},
                     {"transfer_source", c.advtrain.transfer_source}};
    std::vector<std::string> noise_kinds;
    for (auto k : c.noise.kinds) {
        noise_kinds.push_back(noise_kind_name(k));
    }
    j["noise"] = {{"model", c.noise.model},
                  {"kinds", noise_kinds},
                  {"strengths", c.noise.strengths},
                  {"trajectories", c.noise.trajectories}};
    std::vector<std::string> attack_kinds;
    for (auto k : c.detect.kinds) {
        attack_kinds.push_back(attack_kind_name(k));
    }
    j["detect"] = {{"classical", c.detect.classical},
                   {"quantum", c.detect.quantum},
                   {"attack_source", c.detect.attack_source},
                   {"pool_size", c.detect.pool_size},
                   {"kinds", attack_kinds},
                   {"epsilons", c.detect.epsilons}};
    j["export"] = {{"model", c.export_.model},
                   {"epsilon", c.export_.epsilon},
                   {"count", c.export_.count}};
    j["seed"] = c.seeds.base;
    j["seeds"] = c.explicit_seeds;
    return j;
}

inline std::string config_hash(const ExperimentConfig &c) {
    return hex64(fnv1a64(canonical_json(c).dump()));
}

inline nlohmann::json seeds_json(const Seeds &s) {
    return {{"base", s.base},         {"split", s.split},   {"eval", s.eval},
            {"attack", s.attack},     {"noise", s.noise},   {"detect", s.detect},
            {"synth", s.synth},       {"model_init", s.model_init},
            {"model_train", s.model_train}};
}

} // namespace qrobust::harness
